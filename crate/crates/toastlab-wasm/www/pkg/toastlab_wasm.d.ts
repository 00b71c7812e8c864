/* tslint:disable */
/* eslint-disable */

/**
 * SVG of a perfect matching rounded from the uniform 1/4 fractional state.
 */
export function demo_matching(side: number, levels: number, seed: bigint): string;

/**
 * SVG of a balanced orientation obtained by peeling cycles through the
 * toast levels.
 */
export function demo_orientation(side: number, levels: number, seed: bigint): string;

/**
 * JSON summary: tile counts, axiom checks, and certificate sizes.
 */
export function demo_stats(side: number, levels: number, seed: bigint): string;

/**
 * SVG of the tile decomposition on a side x side torus.
 */
export function demo_toast(side: number, levels: number, seed: bigint): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly demo_matching: (a: number, b: number, c: bigint) => [number, number, number, number];
    readonly demo_orientation: (a: number, b: number, c: bigint) => [number, number, number, number];
    readonly demo_stats: (a: number, b: number, c: bigint) => [number, number, number, number];
    readonly demo_toast: (a: number, b: number, c: bigint) => [number, number, number, number];
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
