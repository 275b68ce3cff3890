// Filter control state: one control per schema field, kind-correct.
// Untouched controls contribute nothing to the request body.

import type { FilterBody, RangeBody, Schema } from "./types.js";

export interface CategoricalControl {
  kind: "categorical";
  field: string;
  options: string[];
  selected: Set<string>;
}

export interface RangeControl {
  kind: "real" | "timestamp";
  field: string;
  min: string;
  max: string;
  observedMin?: string;
  observedMax?: string;
}

export type FilterControl = CategoricalControl | RangeControl;

export function buildControls(schema: Schema): FilterControl[] {
  return Object.entries(schema).map(([field, spec]) => {
    if (spec.kind === "categorical") {
      return { kind: "categorical", field, options: [...spec.values], selected: new Set<string>() };
    }
    return {
      kind: spec.kind,
      field,
      min: "",
      max: "",
      observedMin: spec.min === undefined ? undefined : String(spec.min),
      observedMax: spec.max === undefined ? undefined : String(spec.max),
    };
  });
}

export function isDirty(control: FilterControl): boolean {
  if (control.kind === "categorical") {
    return control.selected.size > 0;
  }
  return control.min.trim() !== "" || control.max.trim() !== "";
}

export function resetControl(control: FilterControl): void {
  if (control.kind === "categorical") {
    control.selected.clear();
  } else {
    control.min = "";
    control.max = "";
  }
}

function bound(control: RangeControl, raw: string): number | string {
  const text = raw.trim();
  if (control.kind === "real") {
    return Number(text);
  }
  // Timestamp bounds go through as typed (ISO 8601); purely numeric input
  // is treated as an epoch value.
  const n = Number(text);
  return Number.isFinite(n) && text !== "" ? n : text;
}

/** Pre-submission validation; null means the control may be sent. */
export function boundsError(control: FilterControl): string | null {
  if (control.kind === "categorical") {
    return null;
  }
  const lo = control.min.trim();
  const hi = control.max.trim();
  if (control.kind === "real") {
    if (lo !== "" && !Number.isFinite(Number(lo))) {
      return `${control.field}: min must be a number`;
    }
    if (hi !== "" && !Number.isFinite(Number(hi))) {
      return `${control.field}: max must be a number`;
    }
    if (lo !== "" && hi !== "" && Number(lo) > Number(hi)) {
      return `${control.field}: min exceeds max`;
    }
    return null;
  }
  if (lo === "" || hi === "") {
    return null;
  }
  const a = Date.parse(lo);
  const b = Date.parse(hi);
  if (Number.isNaN(a) || Number.isNaN(b)) {
    return null; // unparseable here; the server validates formats
  }
  return a > b ? `${control.field}: min exceeds max` : null;
}

/** Request filters built from dirty controls only. */
export function collectFilters(controls: FilterControl[]): FilterBody {
  const out: FilterBody = {};
  for (const control of controls) {
    if (!isDirty(control)) {
      continue;
    }
    if (control.kind === "categorical") {
      out[control.field] = [...control.selected].sort();
    } else {
      const range: RangeBody = {};
      if (control.min.trim() !== "") {
        range.min = bound(control, control.min);
      }
      if (control.max.trim() !== "") {
        range.max = bound(control, control.max);
      }
      out[control.field] = range;
    }
  }
  return out;
}
