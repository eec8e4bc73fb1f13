/** DOM wiring for the job form, status line and result gallery. */

import { Api, AtlasInfo, createApi } from "./api.js";
import { renderGalleryHTML, hashNoteFor } from "./gallery.js";
import { HashesByName, compareHashes, sha256Hex } from "./hash.js";
import { Phase, submitAndPoll } from "./poll.js";
import {
  FormState,
  Mode,
  RESOLUTION_PRESETS,
  addColor,
  buildJobConfig,
  canSubmit,
  defaultForm,
  fieldForKey,
  removeColor,
  selectAtlas,
  setColor,
  toggleView,
  viewOptions,
  whySubmitDisabled,
} from "./state.js";

const api: Api = createApi("");

let state: FormState = defaultForm();
let atlases: AtlasInfo[] = [];
let lastHashes: HashesByName | null = null;
let lastConfigFingerprint: string | null = null;
let submitting = false;

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

function setState(next: FormState): void {
  state = next;
  renderForm();
}

function clearFieldErrors(): void {
  document
    .querySelectorAll<HTMLElement>(".field-error")
    .forEach((el) => (el.textContent = ""));
}

function showFieldError(field: string, message: string): void {
  const slot = document.querySelector<HTMLElement>(
    `[data-error-for="${field}"]`,
  );
  if (slot) {
    slot.textContent = message;
  } else {
    setBanner("error", message);
  }
}

function setBanner(kind: "" | "info" | "error" | "busy", text = ""): void {
  const banner = $("banner");
  banner.className = kind ? `banner ${kind}` : "banner hidden";
  banner.textContent = text;
}

function setStatus(text: string): void {
  $("status").textContent = text;
}

function renderAtlasSelect(): void {
  const select = $<HTMLSelectElement>("atlas");
  select.innerHTML = "";
  const placeholder = document.createElement("option");
  placeholder.value = "";
  placeholder.textContent = atlases.length
    ? "choose an atlas"
    : "no atlases registered";
  select.appendChild(placeholder);
  for (const atlas of atlases) {
    const option = document.createElement("option");
    option.value = atlas.atlas_id;
    option.textContent = `${atlas.atlas_id} (${atlas.regions} regions)`;
    option.selected = state.atlas?.atlas_id === atlas.atlas_id;
    select.appendChild(option);
  }
}

function renderViews(): void {
  const box = $("views");
  box.innerHTML = "";
  for (const option of viewOptions(state)) {
    const label = document.createElement("label");
    label.className = option.supported ? "view" : "view unsupported";
    const input = document.createElement("input");
    input.type = "checkbox";
    input.value = option.view;
    input.checked = option.checked;
    input.disabled = !option.supported;
    input.addEventListener("change", () => setState(toggleView(state, option.view)));
    label.appendChild(input);
    label.appendChild(document.createTextNode(" " + option.view));
    if (!option.supported) {
      label.title = "not supported by the selected atlas";
    }
    box.appendChild(label);
  }
}

function renderColors(): void {
  const box = $("colors");
  box.innerHTML = "";
  state.colors.forEach((color, index) => {
    const input = document.createElement("input");
    input.type = "color";
    input.value = color;
    input.title = `anchor ${index}`;
    input.addEventListener("change", () =>
      setState(setColor(state, index, input.value)),
    );
    box.appendChild(input);
  });
  const k = document.createElement("span");
  k.className = "k-note";
  k.textContent = `K = ${state.colors.length - 1}`;
  box.appendChild(k);
}

function renderForm(): void {
  renderAtlasSelect();
  renderViews();
  renderColors();
  $<HTMLInputElement>("shell-alpha").value = String(state.shellAlpha);
  $<HTMLInputElement>("log-transform").checked = state.logTransform;
  const fold = $<HTMLInputElement>("log-fold-range");
  fold.value = String(state.logFoldRange);
  fold.disabled = !state.logTransform;
  document
    .querySelectorAll<HTMLInputElement>("input[name=mode]")
    .forEach((radio) => (radio.checked = radio.value === state.mode));
  $("animation-options").classList.toggle("hidden", state.mode !== "animation");
  $<HTMLInputElement>("fpt").value = String(state.fpt);
  $<HTMLInputElement>("delay").value = String(state.delayCs);
  $("csv-name").textContent = state.csvName ?? "no file chosen";

  const submit = $<HTMLButtonElement>("submit");
  submit.disabled = !canSubmit(state) || submitting;
  const why = whySubmitDisabled(state);
  $("submit-hint").textContent = submitting ? "working..." : why ?? "";
}

function onPhase(phase: Phase): void {
  switch (phase.kind) {
    case "submitting":
      setBanner("");
      setStatus("submitting job...");
      break;
    case "waiting":
      setStatus(`job ${phase.jobId}: ${phase.status}`);
      break;
    case "done":
      setStatus(`job ${phase.jobId}: done (${phase.images.length} images)`);
      break;
    case "fieldError":
      setStatus("rejected");
      showFieldError(fieldForKey(phase.key), phase.message);
      break;
    case "busy":
      setStatus("rejected");
      setBanner("busy", `Server busy: ${phase.message}. Try again shortly.`);
      break;
    case "network":
      setStatus("network trouble");
      setBanner("error", `Network failure: ${phase.message}. Check the service and retry.`);
      break;
    case "failed":
      setStatus("failed");
      setBanner("error", phase.message);
      break;
  }
}

async function handleSubmit(): Promise<void> {
  if (!canSubmit(state) || submitting) return;
  clearFieldErrors();
  submitting = true;
  renderForm();
  try {
    const config = buildJobConfig(state);
    const fingerprint = JSON.stringify({ config, csv: state.csvText });
    const result = await submitAndPoll(api, config, state.csvText!, onPhase);
    if (result) {
      const hashes: HashesByName = new Map();
      for (const name of result.images) {
        const bytes = await api.fetchImage(result.jobId, name);
        hashes.set(name, await sha256Hex(bytes));
      }
      const note =
        fingerprint === lastConfigFingerprint
          ? hashNoteFor(compareHashes(lastHashes, hashes))
          : null;
      lastHashes = hashes;
      lastConfigFingerprint = fingerprint;
      $("gallery").innerHTML = renderGalleryHTML(
        result.images.map((name) => ({
          name,
          url: api.imageUrl(result.jobId, name),
        })),
        note,
      );
    }
  } finally {
    submitting = false;
    renderForm();
  }
}

function wireStaticInputs(): void {
  $<HTMLSelectElement>("atlas").addEventListener("change", (event) => {
    const id = (event.target as HTMLSelectElement).value;
    const atlas = atlases.find((a) => a.atlas_id === id);
    if (atlas) setState(selectAtlas(state, atlas));
  });

  $<HTMLInputElement>("csv").addEventListener("change", async (event) => {
    const input = event.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    const text = await file.text();
    setState({ ...state, csvText: text, csvName: file.name });
  });

  const presets = $<HTMLSelectElement>("resolution");
  RESOLUTION_PRESETS.forEach(([w, h], index) => {
    const option = document.createElement("option");
    option.value = String(index);
    option.textContent = `${w} x ${h}`;
    presets.appendChild(option);
  });
  presets.addEventListener("change", () => {
    const [w, h] = RESOLUTION_PRESETS[Number(presets.value)];
    setState({ ...state, resolution: [w, h] });
  });

  $<HTMLInputElement>("shell-alpha").addEventListener("change", (event) => {
    const value = Number((event.target as HTMLInputElement).value);
    setState({ ...state, shellAlpha: Math.min(Math.max(value, 0), 1) });
  });

  $<HTMLInputElement>("log-transform").addEventListener("change", (event) => {
    setState({ ...state, logTransform: (event.target as HTMLInputElement).checked });
  });
  $<HTMLInputElement>("log-fold-range").addEventListener("change", (event) => {
    const value = Number((event.target as HTMLInputElement).value);
    if (value > 1) setState({ ...state, logFoldRange: value });
  });

  document.querySelectorAll<HTMLInputElement>("input[name=mode]").forEach((radio) =>
    radio.addEventListener("change", () => {
      if (radio.checked) setState({ ...state, mode: radio.value as Mode });
    }),
  );
  $<HTMLInputElement>("fpt").addEventListener("change", (event) => {
    const value = Number((event.target as HTMLInputElement).value);
    if (value >= 1) setState({ ...state, fpt: Math.floor(value) });
  });
  $<HTMLInputElement>("delay").addEventListener("change", (event) => {
    const value = Number((event.target as HTMLInputElement).value);
    if (value >= 0) setState({ ...state, delayCs: Math.floor(value) });
  });

  $("add-color").addEventListener("click", () => setState(addColor(state)));
  $("remove-color").addEventListener("click", () => setState(removeColor(state)));
  $<HTMLButtonElement>("submit").addEventListener("click", () => {
    void handleSubmit();
  });
}

async function boot(): Promise<void> {
  wireStaticInputs();
  renderForm();
  setStatus("loading atlases...");
  try {
    atlases = await api.listAtlases();
    if (atlases.length === 1) {
      state = selectAtlas(state, atlases[0]);
    }
    setStatus(atlases.length ? "ready" : "no atlases registered on the server");
  } catch (error) {
    setBanner(
      "error",
      `Cannot reach the render service: ${error instanceof Error ? error.message : error}`,
    );
    setStatus("offline");
  }
  renderForm();
}

void boot();
