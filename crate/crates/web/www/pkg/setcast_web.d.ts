/* tslint:disable */
/* eslint-disable */

/**
 * SVM trained on 2-D points, evaluated on a square grid.
 */
export class SvmSurface {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    converged(): boolean;
    /**
     * Row-major decision values, `resolution` rows from y_min upwards.
     */
    decisions(): Float64Array;
    /**
     * Indices of the input points with nonzero multipliers.
     */
    support(): Uint32Array;
}

/**
 * Fixture values of one attribute, as (value, label) pairs with label 1 for UP.
 */
export function attributeValues(attribute: number): Float64Array;

export function compareOnFixture(folds: number, seed: number, kernel: string, cost: number): string;

export function densityCurves(attribute: number, x_min: number, x_max: number, steps: number): Float64Array;

export function featureNames(): string[];

/**
 * `points` holds (x, y, label) triples with label > 0 for UP. `kernel` uses
 * the CLI spelling: `linear`, `poly:<degree>`, `rbf:<delta_sq>`.
 */
export function svmSurface(points: Float64Array, kernel: string, cost: number, x_min: number, x_max: number, y_min: number, y_max: number, resolution: number): SvmSurface;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_svmsurface_free: (a: number, b: number) => void;
    readonly attributeValues: (a: number) => [number, number];
    readonly compareOnFixture: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly densityCurves: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly featureNames: () => [number, number];
    readonly svmSurface: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number];
    readonly svmsurface_converged: (a: number) => number;
    readonly svmsurface_decisions: (a: number) => [number, number];
    readonly svmsurface_support: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __externref_drop_slice: (a: number, b: number) => void;
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
