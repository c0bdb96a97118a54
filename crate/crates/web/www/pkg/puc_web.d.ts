/* tslint:disable */
/* eslint-disable */

export class SweepResult {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Smoothed, distance-compensated amplitude in volts.
     */
    readonly amplitudes: Float64Array;
    readonly freqs: Float64Array;
    /**
     * NaN when the spectrum has no interior minimum.
     */
    readonly valley_hz: number;
}

/**
 * Closed-form anti-resonance in hertz for `c_load_pf`.
 */
export function antiresonance_hz(c_load_pf: number): number;

/**
 * |Z| in ohms of the fitted circuit with `c_load_pf` attached.
 */
export function impedance_curve(c_load_pf: number, f_start: number, f_stop: number, n: number): Float64Array;

/**
 * |Γ| of the antenna face seen from water.
 */
export function reflection_curve(c_load_pf: number, f_start: number, f_stop: number, n: number): Float64Array;

/**
 * Simulated pulse-echo sweep. A non-finite `snr_db` means noiseless.
 */
export function sweep_spectrum(c_load_pf: number, distance_cm: number, snr_db: number, seed: number, step_hz: number): SweepResult;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_sweepresult_free: (a: number, b: number) => void;
    readonly antiresonance_hz: (a: number) => number;
    readonly impedance_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly reflection_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly sweep_spectrum: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly sweepresult_amplitudes: (a: number) => [number, number];
    readonly sweepresult_freqs: (a: number) => [number, number];
    readonly sweepresult_valley_hz: (a: number) => number;
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
