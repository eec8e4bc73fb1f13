/** Form state and the rules tying it to the service contract. */

import type { AtlasInfo, JobConfig } from "./api.js";

export const ALL_VIEWS = [
  "cortical-outer-left",
  "cortical-outer-right",
  "cortical-inner-left",
  "cortical-inner-right",
  "subcortical",
  "top",
  "bottom",
] as const;

export const DEFAULT_COLORS = ["#CCCCCC", "#FFF500", "#FF7800", "#FF0000"];

export const RESOLUTION_PRESETS: Array<[number, number]> = [
  [640, 480],
  [800, 600],
  [1200, 900],
  [1600, 1200],
];

export type Mode = "images" | "montage" | "animation";

export interface FormState {
  atlas: AtlasInfo | null;
  views: string[];
  colors: string[];
  resolution: [number, number];
  shellAlpha: number;
  logTransform: boolean;
  logFoldRange: number;
  mode: Mode;
  fpt: number;
  delayCs: number;
  csvText: string | null;
  csvName: string | null;
}

export function defaultForm(): FormState {
  return {
    atlas: null,
    views: ["cortical-outer-right", "subcortical", "top"],
    colors: [...DEFAULT_COLORS],
    resolution: [640, 480],
    shellAlpha: 0.3,
    logTransform: false,
    logFoldRange: 1000,
    mode: "images",
    fpt: 4,
    delayCs: 50,
    csvText: null,
    csvName: null,
  };
}

export interface ViewOption {
  view: string;
  supported: boolean;
  checked: boolean;
}

/** Checkbox rows: always the full named-view set, disabled when the
 * selected atlas does not support a view (its set mirrors the last
 * /atlases fetch, never a client-side guess). */
export function viewOptions(state: FormState): ViewOption[] {
  const supported = new Set(state.atlas?.views_supported ?? ALL_VIEWS);
  return ALL_VIEWS.map((view) => ({
    view,
    supported: supported.has(view),
    checked: state.views.includes(view) && supported.has(view),
  }));
}

/** Selecting an atlas prunes now-unsupported views from the selection. */
export function selectAtlas(state: FormState, atlas: AtlasInfo): FormState {
  const supported = new Set(atlas.views_supported);
  return {
    ...state,
    atlas,
    views: state.views.filter((v) => supported.has(v)),
  };
}

export function toggleView(state: FormState, view: string): FormState {
  const views = state.views.includes(view)
    ? state.views.filter((v) => v !== view)
    : [...state.views, view];
  return { ...state, views };
}

export function setColor(state: FormState, index: number, color: string): FormState {
  const colors = [...state.colors];
  colors[index] = color.toUpperCase();
  return { ...state, colors };
}

export function addColor(state: FormState): FormState {
  return { ...state, colors: [...state.colors, "#FFFFFF"] };
}

export function removeColor(state: FormState): FormState {
  if (state.colors.length <= 2) return state;
  return { ...state, colors: state.colors.slice(0, -1) };
}

/** Submit stays disabled until an atlas and a CSV are chosen. */
export function canSubmit(state: FormState): boolean {
  return (
    state.atlas !== null &&
    state.csvText !== null &&
    state.views.length > 0 &&
    state.colors.length >= 2
  );
}

export function whySubmitDisabled(state: FormState): string | null {
  if (state.atlas === null) return "pick an atlas";
  if (state.csvText === null) return "upload a biomarker CSV";
  if (state.views.length === 0) return "select at least one view";
  if (state.colors.length < 2) return "gradient needs at least 2 colors";
  return null;
}

/** The job config exactly as the service schema expects it (colors stay
 * #RRGGBB text; no client-side color math). */
export function buildJobConfig(state: FormState): JobConfig {
  if (!state.atlas) throw new Error("no atlas selected");
  const config: JobConfig = {
    atlas: state.atlas.atlas_id,
    views: [...state.views],
    colors: [...state.colors],
    resolution: [...state.resolution] as [number, number],
    shell_alpha: state.shellAlpha,
    log_transform: state.logTransform,
    log_fold_range: state.logFoldRange,
    mode: state.mode,
  };
  if (state.mode === "animation") {
    config.fpt = state.fpt;
    config.delay_cs = state.delayCs;
    config.animation_view = state.views[0];
  }
  return config;
}

/** Map the server's key-path diagnostic (e.g. "colors[1]") onto the form
 * field that should display it. */
export function fieldForKey(key: string | undefined): string {
  if (!key) return "form";
  const root = key.replace(/\[.*$/, "").replace(/\..*$/, "");
  const known: Record<string, string> = {
    atlas: "atlas",
    csv: "csv",
    colors: "colors",
    views: "views",
    resolution: "resolution",
    shell_alpha: "shell-alpha",
    log_transform: "log-transform",
    log_fold_range: "log-fold-range",
    log_ref: "log-fold-range",
    mode: "mode",
    fpt: "fpt",
    delay_cs: "delay",
    animation_view: "views",
  };
  return known[root] ?? "form";
}
