/* tslint:disable */
/* eslint-disable */

/**
 * Random acoustic data evaluated in closed form at any time.
 */
export class AcousticMovie {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `sigma` at time `t`.
     */
    frame(t: number): Float64Array;
    constructor(n: number, epsilon: number, gamma: number, seed: bigint);
    /**
     * Period of the slowest nonzero mode.
     */
    period(): number;
}

/**
 * A running QNS simulation from the sine-density profile.
 */
export class QnsSession {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `(n - 1) / eps`.
     */
    density(): Float64Array;
    energy(): number;
    entropy(): number;
    constructor(n: number, epsilon: number, amplitude: number);
    step(steps: number): void;
    time(): number;
}

export function bohm_form_gap(n: number, amplitude: number, kx: number, ky: number): number;

export function bohm_magnitude(n: number, amplitude: number, kx: number, ky: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_acousticmovie_free: (a: number, b: number) => void;
    readonly __wbg_qnssession_free: (a: number, b: number) => void;
    readonly acousticmovie_frame: (a: number, b: number) => [number, number, number, number];
    readonly acousticmovie_new: (a: number, b: number, c: number, d: bigint) => [number, number, number];
    readonly acousticmovie_period: (a: number) => number;
    readonly bohm_form_gap: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly bohm_magnitude: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly qnssession_density: (a: number) => [number, number];
    readonly qnssession_energy: (a: number) => [number, number, number];
    readonly qnssession_entropy: (a: number) => [number, number, number];
    readonly qnssession_new: (a: number, b: number, c: number) => [number, number, number];
    readonly qnssession_step: (a: number, b: number) => [number, number];
    readonly qnssession_time: (a: number) => number;
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
