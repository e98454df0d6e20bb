// Expects the wasm-bindgen output (target web) in ./pkg.
import init, { classify_conic, resonance_scan, catalog_solve, catalog_models } from "./pkg/frobenius_pde_web.js";

const $ = (id) => document.getElementById(id);
const NAMES = ["A", "B", "C", "D", "E", "F"];
const DEFAULT_CONIC = [1, 2, 1, -1, -1, 0];

function show(el, text, isError) {
  el.textContent = text;
  el.className = isError ? "err" : "";
}

function conicCoeffs() {
  return NAMES.map((n) => Number($("c-" + n).value));
}

// Sign changes of P on a grid mark the zero set; also draws the axes.
function plotConic(k, canvas) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, span = 6;
  const toR = (i) => -span + (2 * span * i) / w;
  const toS = (j) => span - (2 * span * j) / h;
  const P = (r, s) => k[0] * r * r + k[1] * r * s + k[2] * s * s + k[3] * r + k[4] * s + k[5];
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#bbb";
  ctx.beginPath();
  ctx.moveTo(w / 2, 0); ctx.lineTo(w / 2, h);
  ctx.moveTo(0, h / 2); ctx.lineTo(w, h / 2);
  ctx.stroke();
  ctx.fillStyle = "#1565c0";
  for (let i = 0; i < w; i++) {
    for (let j = 0; j < h; j++) {
      const v = P(toR(i), toS(j));
      if (v === 0 || v * P(toR(i + 1), toS(j)) < 0 || v * P(toR(i), toS(j + 1)) < 0) {
        ctx.fillRect(i, j, 1.5, 1.5);
      }
    }
  }
  ctx.fillStyle = "#333";
  ctx.fillText("r", w - 10, h / 2 - 4);
  ctx.fillText("s", w / 2 + 4, 10);
  ctx.fillText(`[-${span}, ${span}]²`, 4, h - 4);
}

// log10 of the layer sums, which shows the growth rate of the coefficients.
function plotLayers(sums, canvas) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 30;
  ctx.clearRect(0, 0, w, h);
  const pts = sums.map((v, n) => [n, v > 0 ? Math.log10(v) : null]).filter((p) => p[1] !== null);
  if (pts.length === 0) return;
  const ys = pts.map((p) => p[1]);
  const lo = Math.min(...ys), hi = Math.max(...ys, lo + 1);
  const X = (n) => pad + ((w - 2 * pad) * n) / Math.max(1, sums.length - 1);
  const Y = (v) => h - pad - ((h - 2 * pad) * (v - lo)) / (hi - lo);
  ctx.strokeStyle = "#bbb";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#c62828";
  for (const [n, v] of pts) ctx.fillRect(X(n) - 2, Y(v) - 2, 4, 4);
  ctx.fillStyle = "#333";
  ctx.fillText(`log10 layer sum: ${hi.toFixed(1)}`, pad, pad - 8);
  ctx.fillText(lo.toFixed(1), 2, h - pad);
  ctx.fillText("layer n", w - pad - 40, h - 8);
}

async function main() {
  await init();

  const box = $("conic-inputs");
  NAMES.forEach((n, i) => {
    box.insertAdjacentHTML("beforeend",
      `${n} <input id="c-${n}" type="number" step="any" value="${DEFAULT_CONIC[i]}"> `);
  });

  $("classify").onclick = () => {
    const k = conicCoeffs();
    plotConic(k, $("conic-plot"));
    try {
      show($("classify-out"), JSON.stringify(JSON.parse(classify_conic(k)), null, 2));
    } catch (e) {
      show($("classify-out"), String(e), true);
    }
  };

  $("scan").onclick = () => {
    try {
      const out = resonance_scan(conicCoeffs(), Number($("scan-r").value), Number($("scan-s").value),
        Number($("scan-bound").value));
      show($("scan-out"), JSON.stringify(JSON.parse(out)));
    } catch (e) {
      show($("scan-out"), String(e), true);
    }
  };

  const models = JSON.parse(catalog_models());
  for (const [name, param] of models) {
    $("model").insertAdjacentHTML("beforeend", `<option value="${name}" data-param="${param ?? ""}">${name}</option>`);
  }
  const syncParam = () => {
    const p = $("model").selectedOptions[0].dataset.param;
    $("param-label").style.visibility = p ? "visible" : "hidden";
    $("param-label").firstChild.textContent = (p || "param") + " ";
  };
  $("model").onchange = syncParam;
  syncParam();

  $("solve").onclick = () => {
    try {
      const out = JSON.parse(catalog_solve($("model").value, Number($("param").value), Number($("order").value),
        Number($("solve-r").value), Number($("solve-s").value), $("compatible").checked));
      plotLayers(out.layer_sums, $("layer-plot"));
      const head = out.coeffs.slice(0, 12).map(([a, b, re, im]) => `D(${a},${b}) = ${re}${im ? ` + ${im}i` : ""}`);
      show($("solve-out"), [
        `radius estimate: ${out.radius === null ? "unbounded" : out.radius.toPrecision(6)}`,
        `max residual: ${out.max_residual.toExponential(2)}`,
        `compatible resonances set to zero: ${out.compatible_resonances}`,
        `${out.coeffs.length} nonzero coefficients; first ones:`,
        ...head,
      ].join("\n"));
    } catch (e) {
      show($("solve-out"), String(e), true);
    }
  };

  $("classify").onclick();
}

main();
