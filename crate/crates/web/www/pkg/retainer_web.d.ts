/* tslint:disable */
/* eslint-disable */

/**
 * Loss, wait, idle workers and retainer cost for pools of size `0..=c_max`.
 */
export function poolCurves(lambda: number, mu: number, wage_per_minute: number, c_max: number): string;

/**
 * Short seeded simulation next to the closed-form values.
 */
export function simulatePool(lambda: number, mu: number, c: number, tasks: number, seed: number): string;

/**
 * Total cost per pool size for a per-task miss cost, with the cheapest pool.
 */
export function totalCostCurve(lambda: number, mu: number, wage_per_minute: number, c_task: number, c_max: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly poolCurves: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly simulatePool: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly totalCostCurve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
