// Layouts of the exported Float64Arrays:
//   berry_curve:   records of 4 (r, closed form, Wilson loop, exact holonomy)
//   readout_curve: records of 4 (t, simulated, law, Rabi sum)
//   protocol_run:  [fidelity, p_g[0..N], p_e[0..N], target p_g[0..N]]
import init, { berry_curve, readout_curve, protocol_run, demo_fock_dim } from "./pkg/berryion_web.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

function columns(flat, width) {
  const cols = Array.from({ length: width }, () => []);
  for (let i = 0; i + width <= flat.length; i += width) {
    for (let j = 0; j < width; j++) cols[j].push(flat[i + j]);
  }
  return cols;
}

function plot(canvas, xs, series, { bars = false } = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  const ys = series.flatMap((s) => s.ys);
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const px = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const py = (y) => h - pad - ((y - y0) / (y1 - y0)) * (h - 2 * pad);
  ctx.strokeStyle = "#000";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#000";
  ctx.font = "11px sans-serif";
  ctx.fillText(y1.toFixed(3), 2, pad + 4);
  ctx.fillText(y0.toFixed(3), 2, h - pad);
  ctx.fillText(x0.toFixed(2), pad, h - pad + 14);
  ctx.fillText(x1.toFixed(2), w - pad - 24, h - pad + 14);
  series.forEach((s, k) => {
    ctx.strokeStyle = ctx.fillStyle = COLORS[k % COLORS.length];
    if (bars) {
      const bw = (w - 2 * pad) / xs.length / (series.length + 1);
      xs.forEach((x, i) => {
        const top = py(s.ys[i]);
        ctx.fillRect(px(x) + k * bw, top, bw, py(y0) - top);
      });
    } else {
      ctx.beginPath();
      xs.forEach((x, i) => (i ? ctx.lineTo(px(x), py(s.ys[i])) : ctx.moveTo(px(x), py(s.ys[i]))));
      ctx.stroke();
    }
    ctx.fillText(s.name, w - pad - 150, pad + 14 * (k + 1));
  });
}

const num = (id) => Number(document.getElementById(id).value);

function runBerry() {
  const [r, closed, wilson, holonomy] = columns(berry_curve(num("berry-n"), num("berry-rmax"), 41), 4);
  plot(document.getElementById("berry"), r, [
    { name: "closed form", ys: closed },
    { name: "Wilson loop", ys: wilson },
    { name: "exact eigenvectors", ys: holonomy },
  ]);
}

function runReadout() {
  const [t, sim, law, rabi] = columns(readout_curve(num("readout-alpha"), 401), 4);
  plot(document.getElementById("readout"), t, [
    { name: "simulated", ys: sim },
    { name: "P_e law", ys: law },
    { name: "Rabi sum", ys: rabi },
  ]);
}

function runProtocol() {
  const n = demo_fock_dim();
  const out = protocol_run(num("proto-wt"), num("proto-alpha"), num("proto-steps"));
  document.getElementById("proto-fid").textContent = `fidelity with |g,−α⟩: ${out[0].toFixed(4)}`;
  const fock = Array.from({ length: 12 }, (_, k) => k);
  plot(document.getElementById("proto"), fock, [
    { name: "p_g final", ys: fock.map((k) => out[1 + k]) },
    { name: "p_e final", ys: fock.map((k) => out[1 + n + k]) },
    { name: "p_g target", ys: fock.map((k) => out[1 + 2 * n + k]) },
  ], { bars: true });
}

function guard(f) {
  return () => {
    try { f(); } catch (e) { alert(e.message ?? e); }
  };
}

await init();
document.getElementById("berry-go").onclick = guard(runBerry);
document.getElementById("readout-go").onclick = guard(runReadout);
document.getElementById("proto-go").onclick = guard(runProtocol);
guard(runBerry)();
guard(runReadout)();
