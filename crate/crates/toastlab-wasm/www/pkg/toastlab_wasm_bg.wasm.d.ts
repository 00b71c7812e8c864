/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const demo_matching: (a: number, b: number, c: bigint) => [number, number, number, number];
export const demo_orientation: (a: number, b: number, c: bigint) => [number, number, number, number];
export const demo_stats: (a: number, b: number, c: bigint) => [number, number, number, number];
export const demo_toast: (a: number, b: number, c: bigint) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
