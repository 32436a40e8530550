/* tslint:disable */
/* eslint-disable */

export function element_count(): number;

export function optimize_caps(alpha_deg: number, beta_deg: number, starts: number, seed: bigint): Float64Array;

export function parallel_ray_error(beta_deg: number, half_width_m: number, r_min: number, r_max: number, points: number): Float64Array;

export function sweep_brcs(caps_pf: Float64Array, beta_deg: number, step_deg: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly element_count: () => number;
    readonly optimize_caps: (a: number, b: number, c: number, d: bigint) => [number, number, number, number];
    readonly parallel_ray_error: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly sweep_brcs: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
