/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_sweepresult_free: (a: number, b: number) => void;
export const antiresonance_hz: (a: number) => number;
export const impedance_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const reflection_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const sweep_spectrum: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const sweepresult_amplitudes: (a: number) => [number, number];
export const sweepresult_freqs: (a: number) => [number, number];
export const sweepresult_valley_hz: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
