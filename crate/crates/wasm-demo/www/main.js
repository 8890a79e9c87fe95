import init, { scenarioInfo, simulateLayout, optimize } from "./pkg/breakwater_wasm.js";

await init();

const info = JSON.parse(scenarioInfo());
const genes = new Array(2 * info.attachments.reduce((n, a) => n + a.segments, 0)).fill(0);
let front = [];

const fieldCanvas = document.getElementById("field");
const scale = Math.min(fieldCanvas.width / info.n_cols, fieldCanvas.height / info.n_rows);

// cell (col, row) is centred at (col, row); rows grow downwards on screen
const px = (p) => [(p[0] + 0.5) * scale, (p[1] + 0.5) * scale];

function colour(h) {
  const t = Math.max(0, Math.min(1, h / info.incident));
  const r = Math.round(255 * t);
  const b = Math.round(255 * (1 - t));
  return `rgb(${r},${Math.round(90 + 80 * (1 - Math.abs(2 * t - 1)))},${b})`;
}
info.incident = Math.max(...info.baseline.wave_heights, 0.1);

function polyline(ctx, vertices, style, width) {
  if (vertices.length < 2) return;
  ctx.strokeStyle = style;
  ctx.lineWidth = width;
  ctx.beginPath();
  vertices.forEach((v, i) => (i ? ctx.lineTo(...px(v)) : ctx.moveTo(...px(v))));
  ctx.stroke();
}

function drawField(result) {
  const ctx = fieldCanvas.getContext("2d");
  ctx.clearRect(0, 0, fieldCanvas.width, fieldCanvas.height);
  for (let row = 0; row < info.n_rows; row++) {
    for (let col = 0; col < info.n_cols; col++) {
      const h = result.heights[row * info.n_cols + col];
      ctx.fillStyle = h === null ? "#e8e2d0" : colour(h);
      ctx.fillRect(col * scale, row * scale, scale + 0.5, scale + 0.5);
    }
  }
  ctx.setLineDash([6, 4]);
  polyline(ctx, info.fairway, "#fff", 2);
  ctx.setLineDash([]);
  for (const s of info.existing_structures) polyline(ctx, s.vertices, "#333", 3);
  for (const b of result.layout.breakwaters) {
    polyline(ctx, b.vertices, b.material === "solid_wall" ? "#000" : "#7a4", 4);
  }
  ctx.fillStyle = "#fff";
  ctx.strokeStyle = "#000";
  ctx.lineWidth = 1;
  info.control_points.forEach((p, i) => {
    const [x, y] = px(p);
    ctx.beginPath();
    ctx.arc(x, y, 5, 0, 2 * Math.PI);
    ctx.fill();
    ctx.stroke();
    ctx.fillStyle = "#000";
    ctx.fillText(`C${i + 1}`, x + 7, y + 4);
    ctx.fillStyle = "#fff";
  });
}

function showObjectives(result) {
  const o = result.objectives;
  const rows = [
    ["Cost", `${o.cost.toFixed(0)} m`, `${result.relative.rel_cost.toFixed(1)} %`],
    ["Fairway distance", `${o.nav_distance.toFixed(0)} m`, `${result.relative.rel_nav.toFixed(1)} %`],
    ...o.wave_heights.map((h, i) => [
      `Height at C${i + 1}`,
      `${h.toFixed(2)} m`,
      `${result.relative.rel_wave_heights[i].toFixed(1)} %`,
    ]),
    ["Violations", o.self_intersections + o.fairway_intersections + o.land_coverage, ""],
    ["Score", result.score.toFixed(4), ""],
  ];
  document.getElementById("objectives").innerHTML = rows
    .map((r) => `<tr>${r.map((c) => `<td>${c}</td>`).join("")}</tr>`)
    .join("");
}

function simulate() {
  const result = JSON.parse(simulateLayout(JSON.stringify({ genes })));
  drawField(result);
  showObjectives(result);
}

const sliders = [];
function buildSliders() {
  const box = document.getElementById("segments");
  let k = 0;
  info.attachments.forEach((a, bi) => {
    for (let s = 0; s < a.segments; s++, k++) {
      const block = k;
      for (const [gene, min, max, step] of [
        [2 * block, 0, info.max_length_cells, 0.1],
        [2 * block + 1, -180, 179, 1],
      ]) {
        const label = document.createElement("label");
        const input = Object.assign(document.createElement("input"), { type: "range", min, max, step, value: 0 });
        const value = Object.assign(document.createElement("span"), { className: "value", textContent: "0" });
        label.append(`B${bi + 1}.${s + 1} ${gene % 2 ? "angle " : "length"} `, input, value);
        input.addEventListener("input", () => {
          genes[gene] = Number(input.value);
          value.textContent = input.value;
          simulate();
        });
        sliders[gene] = [input, value];
        box.append(label);
      }
    }
  });
}

function setGenes(values) {
  values.forEach((v, i) => {
    genes[i] = v;
    sliders[i][0].value = v;
    sliders[i][1].textContent = v.toFixed(geneDigits(i));
  });
  simulate();
}
const geneDigits = (i) => (i % 2 ? 0 : 1);

function axes(ctx, canvas, xs, ys) {
  const pad = 40;
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const sx = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (canvas.width - 2 * pad);
  const sy = (y) => canvas.height - pad - ((y - y0) / (y1 - y0 || 1)) * (canvas.height - 2 * pad);
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, canvas.width - 2 * pad, canvas.height - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.fillText(x0.toPrecision(3), pad, canvas.height - pad + 14);
  ctx.fillText(x1.toPrecision(3), canvas.width - pad - 30, canvas.height - pad + 14);
  ctx.fillText(y1.toPrecision(3), 2, pad + 4);
  ctx.fillText(y0.toPrecision(3), 2, canvas.height - pad);
  return [sx, sy];
}

function drawFront() {
  const canvas = document.getElementById("front");
  const ctx = canvas.getContext("2d");
  if (!front.length) return;
  const [sx, sy] = axes(ctx, canvas, front.map((p) => p.cost_m), front.map((p) => p.mean_height_m));
  ctx.fillStyle = "#c33";
  for (const p of front) {
    p.x = sx(p.cost_m);
    p.y = sy(p.mean_height_m);
    ctx.beginPath();
    ctx.arc(p.x, p.y, 4, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function drawCurve(curve) {
  const canvas = document.getElementById("hv");
  const ctx = canvas.getContext("2d");
  if (!curve.length) return;
  const [sx, sy] = axes(ctx, canvas, curve.map((c) => c.model_runs), curve.map((c) => c.hypervolume));
  ctx.strokeStyle = "#36c";
  ctx.lineWidth = 2;
  ctx.beginPath();
  curve.forEach((c, i) => (i ? ctx.lineTo(sx(c.model_runs), sy(c.hypervolume)) : ctx.moveTo(sx(c.model_runs), sy(c.hypervolume))));
  ctx.stroke();
}

document.getElementById("front").addEventListener("click", (e) => {
  const r = e.target.getBoundingClientRect();
  const [x, y] = [e.clientX - r.left, e.clientY - r.top];
  const hit = front.reduce(
    (best, p) => {
      const d = Math.hypot(p.x - x, p.y - y);
      return d < best.d ? { d, p } : best;
    },
    { d: 10, p: null },
  ).p;
  if (hit) setGenes(hit.genes);
});

document.getElementById("run").addEventListener("click", () => {
  const status = document.getElementById("status");
  status.textContent = "running...";
  // let the status text paint before the synchronous run blocks the page
  setTimeout(() => {
    const t = performance.now();
    const out = JSON.parse(
      optimize(
        JSON.stringify({
          seed: Number(document.getElementById("seed").value),
          generations: Number(document.getElementById("generations").value),
          population: Number(document.getElementById("population").value),
          encoding: document.getElementById("encoding").value,
          greedy: document.getElementById("greedy").checked,
        }),
      ),
    );
    front = out.front;
    drawFront();
    drawCurve(out.hypervolume);
    status.textContent = `${front.length} layouts in ${((performance.now() - t) / 1000).toFixed(1)} s`;
  }, 20);
});

buildSliders();
simulate();
