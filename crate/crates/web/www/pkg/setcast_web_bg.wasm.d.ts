/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_svmsurface_free: (a: number, b: number) => void;
export const attributeValues: (a: number) => [number, number];
export const compareOnFixture: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const densityCurves: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const featureNames: () => [number, number];
export const svmSurface: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number];
export const svmsurface_converged: (a: number) => number;
export const svmsurface_decisions: (a: number) => [number, number];
export const svmsurface_support: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __externref_drop_slice: (a: number, b: number) => void;
export const __wbindgen_start: () => void;
