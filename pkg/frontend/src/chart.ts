// Log-scale likelihood-ratio chart: the trajectory against the continue
// region (B, A) and the terminal threshold gamma.  Model math is kept pure
// so it can be tested without a DOM; rendering emits an SVG string.

export interface ChartInput {
  trajectory: [number, number][]; // [n, L] with L on the natural scale
  A: number;
  B: number;
  gamma: number;
  nMax: number;
}

export interface ChartPoint {
  n: number;
  logL: number;
  x: number;
  y: number;
}

export interface ChartModel {
  width: number;
  height: number;
  pad: number;
  points: ChartPoint[];
  logA: number;
  logB: number;
  logGamma: number | null;
  yA: number;
  yB: number;
  yGamma: number | null;
  xN: number; // horizontal position of the truncation point n = N
  crossedA: boolean;
}

const WIDTH = 680;
const HEIGHT = 380;
const PAD = 48;

export function buildChartModel(input: ChartInput): ChartModel {
  const logA = Math.log(input.A);
  const logB = Math.log(input.B);
  const logGamma = Number.isFinite(input.gamma) ? Math.log(input.gamma) : null;
  const logs = input.trajectory.map(([, L]) => Math.log(L));
  const levels = [logA, logB, ...(logGamma === null ? [] : [logGamma])];
  const yMin = Math.min(...logs, ...levels) - 0.5;
  const yMax = Math.max(...logs, ...levels) + 0.5;

  const sx = (n: number) =>
    PAD + (n / Math.max(input.nMax, 1)) * (WIDTH - 2 * PAD);
  const sy = (v: number) =>
    HEIGHT - PAD - ((v - yMin) / (yMax - yMin)) * (HEIGHT - 2 * PAD);

  const points = input.trajectory.map(([n, L]) => ({
    n,
    logL: Math.log(L),
    x: sx(n),
    y: sy(Math.log(L)),
  }));
  return {
    width: WIDTH,
    height: HEIGHT,
    pad: PAD,
    points,
    logA,
    logB,
    logGamma,
    yA: sy(logA),
    yB: sy(logB),
    yGamma: logGamma === null ? null : sy(logGamma),
    xN: sx(input.nMax),
    crossedA: logs.some((v) => v >= logA),
  };
}

export function renderChartSVG(model: ChartModel): string {
  const { width, height, pad } = model;
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" class="lr-chart">`,
    `<rect width="${width}" height="${height}" fill="#ffffff"/>`,
    // shaded continue region between log B and log A
    `<rect x="${pad}" y="${model.yA.toFixed(1)}" width="${width - 2 * pad}" ` +
      `height="${(model.yB - model.yA).toFixed(1)}" fill="#f0f6ff"/>`,
  ];
  const band = (y: number, color: string, label: string) => {
    parts.push(
      `<line x1="${pad}" y1="${y.toFixed(1)}" x2="${width - pad}" ` +
        `y2="${y.toFixed(1)}" stroke="${color}" stroke-dasharray="6 4"/>`,
      `<text x="${width - pad + 4}" y="${(y + 4).toFixed(1)}" ` +
        `font-size="11" fill="${color}">${label}</text>`,
    );
  };
  band(model.yA, "#c0392b", "log A");
  band(model.yB, "#27ae60", "log B");
  if (model.yGamma !== null) band(model.yGamma, "#8e44ad", "log γ");
  parts.push(
    `<line x1="${model.xN.toFixed(1)}" y1="${pad}" x2="${model.xN.toFixed(1)}" ` +
      `y2="${height - pad}" stroke="#95a5a6" stroke-dasharray="2 4"/>`,
  );
  if (model.points.length > 0) {
    const path = model.points
      .map((p) => `${p.x.toFixed(1)},${p.y.toFixed(1)}`)
      .join(" ");
    parts.push(
      `<polyline points="${path}" fill="none" stroke="#2c3e50" stroke-width="1.5"/>`,
    );
    for (const p of model.points) {
      parts.push(
        `<circle cx="${p.x.toFixed(1)}" cy="${p.y.toFixed(1)}" r="3" fill="#2c3e50"/>`,
      );
    }
  }
  parts.push(
    `<text x="${width / 2}" y="${height - 10}" font-size="12" text-anchor="middle">n</text>`,
    `<text x="12" y="${pad - 8}" font-size="12">log L</text>`,
    `</svg>`,
  );
  return parts.join("");
}
