/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_acousticmovie_free: (a: number, b: number) => void;
export const __wbg_qnssession_free: (a: number, b: number) => void;
export const acousticmovie_frame: (a: number, b: number) => [number, number, number, number];
export const acousticmovie_new: (a: number, b: number, c: number, d: bigint) => [number, number, number];
export const acousticmovie_period: (a: number) => number;
export const bohm_form_gap: (a: number, b: number, c: number, d: number) => [number, number, number];
export const bohm_magnitude: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const qnssession_density: (a: number) => [number, number];
export const qnssession_energy: (a: number) => [number, number, number];
export const qnssession_entropy: (a: number) => [number, number, number];
export const qnssession_new: (a: number, b: number, c: number) => [number, number, number];
export const qnssession_step: (a: number, b: number) => [number, number];
export const qnssession_time: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
