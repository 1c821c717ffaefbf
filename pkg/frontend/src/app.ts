// DOM wiring: binds the form to the controller, debounces re-solves, keeps
// the spec query-encoded in the URL, and repaints panels from controller
// state. All numbers on screen originate in API responses.

import { ApiClient } from "./api.js";
import { demandSvg, frontierSvg } from "./chart.js";
import { FrontierController } from "./controller.js";
import { queryToSpec, specToQuery } from "./state.js";
import type { MaskPointInput, PartInput } from "./types.js";
import {
  errorView,
  fieldErrorsView,
  pointDetailView,
  solutionView,
} from "./views.js";

const DEBOUNCE_MS = 300;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function numberInput(id: string): number {
  return Number((el<HTMLInputElement>(id)).value);
}

export function startApp(api: ApiClient): FrontierController {
  const controller = new FrontierController(api);
  controller.spec = queryToSpec(window.location.search);

  let timer: number | undefined;
  const scheduleRefresh = () => {
    window.clearTimeout(timer);
    timer = window.setTimeout(() => void refresh(), DEBOUNCE_MS);
  };

  async function refresh(): Promise<void> {
    readSpecFromForm();
    history.replaceState(null, "", "?" + specToQuery(controller.spec));
    await controller.refresh();
    render();
  }

  function readSpecFromForm(): void {
    const mask: MaskPointInput[] = [];
    document.querySelectorAll<HTMLElement>("#mask-rows .mask-row").forEach((row) => {
      const value = (name: string) =>
        Number(row.querySelector<HTMLInputElement>(`[data-field="${name}"]`)!.value);
      mask.push({
        freq_Hz: value("freq"),
        target_ohm: value("target"),
        series_ohm: value("series"),
        load_ohm: value("load"),
      });
    });
    controller.spec = {
      ceff_uF: numberInput("ceff"),
      bias_V: numberInput("bias"),
      K_mm2_per_cent: numberInput("kvalue"),
      mask,
      filter: readFilter(),
    };
    controller.sweepParams = {
      kMin: numberInput("kmin"),
      kMax: numberInput("kmax"),
      steps: numberInput("ksteps"),
    };
  }

  function readFilter() {
    const filter: Record<string, unknown> = {};
    const hmax = el<HTMLInputElement>("f-hmax").value.trim();
    if (hmax) filter.max_height_mm = Number(hmax);
    const vmin = el<HTMLInputElement>("f-vmin").value.trim();
    if (vmin) filter.min_voltage_rating_V = Number(vmin);
    const diel = el<HTMLInputElement>("f-diel").value.trim();
    if (diel) filter.allowed_dielectrics = diel.split(",").map((s) => s.trim());
    const mfr = el<HTMLInputElement>("f-mfr").value.trim();
    if (mfr) filter.allowed_manufacturers = mfr.split(",").map((s) => s.trim());
    return filter;
  }

  function writeSpecToForm(): void {
    el<HTMLInputElement>("ceff").value = String(controller.spec.ceff_uF);
    el<HTMLInputElement>("bias").value = String(controller.spec.bias_V);
    el<HTMLInputElement>("kvalue").value = String(controller.spec.K_mm2_per_cent);
    el<HTMLInputElement>("kslider").value = String(
      kToSlider(controller.spec.K_mm2_per_cent),
    );
    el<HTMLElement>("mask-rows").innerHTML = "";
    controller.spec.mask.forEach((point) => addMaskRow(point));
    const filter = controller.spec.filter;
    el<HTMLInputElement>("f-hmax").value = filter.max_height_mm?.toString() ?? "";
    el<HTMLInputElement>("f-vmin").value =
      filter.min_voltage_rating_V?.toString() ?? "";
    el<HTMLInputElement>("f-diel").value =
      filter.allowed_dielectrics?.join(",") ?? "";
    el<HTMLInputElement>("f-mfr").value =
      filter.allowed_manufacturers?.join(",") ?? "";
  }

  function addMaskRow(point?: MaskPointInput): void {
    const row = document.createElement("div");
    row.className = "mask-row";
    const fields: [string, string, number][] = [
      ["freq", "f (Hz)", point?.freq_Hz ?? 1e6],
      ["target", "T (Ω)", point?.target_ohm ?? 0.01],
      ["series", "Zm (Ω)", point?.series_ohm ?? 0],
      ["load", "ZL (Ω)", point?.load_ohm ?? 0],
    ];
    for (const [name, label, value] of fields) {
      const wrap = document.createElement("label");
      wrap.textContent = label;
      const input = document.createElement("input");
      input.type = "number";
      input.step = "any";
      input.dataset.field = name;
      input.value = String(value);
      input.addEventListener("input", scheduleRefresh);
      wrap.appendChild(input);
      row.appendChild(wrap);
    }
    const drop = document.createElement("button");
    drop.type = "button";
    drop.textContent = "×";
    drop.className = "drop";
    drop.addEventListener("click", () => {
      row.remove();
      scheduleRefresh();
    });
    row.appendChild(drop);
    el<HTMLElement>("mask-rows").appendChild(row);
  }

  // The slider moves K over a log scale from 0.01 to 100.
  const kToSlider = (k: number) => Math.log10(Math.max(k, 1e-6)) * 100;
  const sliderToK = (position: number) => Number((10 ** (position / 100)).toPrecision(4));

  function render(): void {
    el<HTMLElement>("field-errors").innerHTML = fieldErrorsView(controller.fieldErrors);
    el<HTMLElement>("banner").innerHTML = controller.banner
      ? errorView(controller.banner.status, controller.banner.payload)
      : "";
    el<HTMLElement>("chart").innerHTML = frontierSvg(
      controller.lastSweep?.points ?? [],
      controller.selected,
    );
    el<HTMLElement>("solution").innerHTML = controller.lastSolve
      ? solutionView(controller.lastSolve)
      : "<p class='empty'>no solution</p>";
    const detail = controller.selected !== null && controller.lastSweep
      ? controller.lastSweep.points[controller.selected]
      : null;
    el<HTMLElement>("point-detail").innerHTML = detail
      ? pointDetailView(detail)
      : "<p class='empty'>click a frontier point</p>";

    document.querySelectorAll<SVGCircleElement>("#chart circle[data-index]")
      .forEach((dot) => {
        dot.addEventListener("click", () => {
          controller.selectPoint(Number(dot.dataset.index));
          render();
        });
      });
  }

  el<HTMLInputElement>("kslider").addEventListener("input", () => {
    const k = sliderToK(Number(el<HTMLInputElement>("kslider").value));
    el<HTMLInputElement>("kvalue").value = String(k);
    void controller.setK(k).then(render);
    history.replaceState(null, "", "?" + specToQuery({ ...controller.spec }));
  });

  for (const id of ["ceff", "bias", "kvalue", "kmin", "kmax", "ksteps",
                    "f-hmax", "f-vmin", "f-diel", "f-mfr"]) {
    el<HTMLInputElement>(id).addEventListener("input", scheduleRefresh);
  }
  el<HTMLButtonElement>("add-mask").addEventListener("click", () => {
    addMaskRow();
    scheduleRefresh();
  });
  el<HTMLButtonElement>("clear-mask").addEventListener("click", () => {
    el<HTMLElement>("mask-rows").innerHTML = "";
    scheduleRefresh();
  });

  el<HTMLFormElement>("part-form").addEventListener("submit", (event) => {
    event.preventDefault();
    const part: PartInput = {
      id: el<HTMLInputElement>("p-id").value.trim(),
      nominal_uF: numberInput("p-nominal"),
      voltage_rating_V: numberInput("p-rating"),
      height_mm: numberInput("p-height"),
      area_mm2: numberInput("p-area"),
      cost_cents: numberInput("p-cost"),
      esr_ohm: numberInput("p-esr"),
      esl_nH: numberInput("p-esl"),
    };
    const bias = el<HTMLInputElement>("p-derate-bias").value.trim();
    const ceff = el<HTMLInputElement>("p-derate-ceff").value.trim();
    if (bias && ceff) {
      part.derating = [{ bias_V: Number(bias), ceff_uF: Number(ceff) }];
    }
    void controller.addPart(part).then(render);
  });

  el<HTMLFormElement>("demand-form").addEventListener("submit", (event) => {
    event.preventDefault();
    const partId = el<HTMLInputElement>("d-part").value.trim();
    const prices = el<HTMLInputElement>("d-prices").value
      .split(",")
      .map((s) => Number(s.trim()))
      .filter((v) => Number.isFinite(v));
    void api
      .demand([controller.spec], partId, prices)
      .then((curve) => {
        el<HTMLElement>("demand-chart").innerHTML = demandSvg(curve.points);
      })
      .catch((error) => {
        controller.banner = {
          status: error.status ?? 0,
          payload: error.payload ?? {
            error: { code: "network", message: String(error) },
          },
        };
        render();
      });
  });

  writeSpecToForm();
  void refresh();
  return controller;
}
