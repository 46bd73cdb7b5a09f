/** Browser console wiring: WebSocket transport, DOM rendering, and event
 * binding. All displayed state lives in the SessionView and changes only
 * through replies or connection events. */

import { KeyTracker } from "./input.js";
import {
  SessionView,
  applyReply,
  canSendKeys,
  initialView,
  onConnect,
  onDisconnect,
  requestExport,
} from "./model.js";
import { encodeMessage, parseReply } from "./wire.js";

let view: SessionView = initialView();
let socket: WebSocket | null = null;
const keys = new KeyTracker();

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

function render(): void {
  byId<HTMLElement>("banner").textContent = view.banner ?? "";
  byId<HTMLElement>("banner").style.display = view.banner ? "block" : "none";
  byId<HTMLElement>("session-id").textContent = view.session ?? "-";
  byId<HTMLElement>("frame-count").textContent = String(view.frameCount);
  byId<HTMLElement>("frame-range").textContent =
    `[${view.latestRange[0]}, ${view.latestRange[1]})`;
  byId<HTMLElement>("queue-depth").textContent = String(view.queueDepth);
  byId<HTMLElement>("last-error").textContent = view.lastError ?? "";
  byId<HTMLElement>("export-path").textContent = view.lastExportPath ?? "";
  const exportBtn = byId<HTMLButtonElement>("export");
  exportBtn.disabled =
    !view.connected || view.session === null || view.exportInFlight;
  const resetBtn = byId<HTMLButtonElement>("reset");
  resetBtn.disabled = !view.connected || view.session === null;
  drawPolyline();
  drawPreviews();
}

function drawPolyline(): void {
  const canvas = byId<HTMLCanvasElement>("path");
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.fillStyle = "#101624";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  const pts = view.polyline;
  if (pts.length === 0) return;
  const xs = pts.map((p) => p.x);
  const zs = pts.map((p) => p.z);
  const minX = Math.min(...xs) - 1;
  const maxX = Math.max(...xs) + 1;
  const minZ = Math.min(...zs) - 1;
  const maxZ = Math.max(...zs) + 1;
  const scale = Math.min(
    canvas.width / (maxX - minX),
    canvas.height / (maxZ - minZ),
  );
  const toPx = (p: { x: number; z: number }) => ({
    u: (p.x - minX) * scale,
    v: canvas.height - (p.z - minZ) * scale,
  });
  ctx.strokeStyle = "#7fd18a";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  pts.forEach((p, i) => {
    const { u, v } = toPx(p);
    if (i === 0) ctx.moveTo(u, v);
    else ctx.lineTo(u, v);
  });
  ctx.stroke();
  const head = toPx(pts[pts.length - 1]);
  ctx.fillStyle = "#f2e7c0";
  ctx.beginPath();
  ctx.arc(head.u, head.v, 3, 0, 2 * Math.PI);
  ctx.fill();
}

function drawPreviews(): void {
  const strip = byId<HTMLElement>("previews");
  strip.innerHTML = "";
  for (const b64 of view.previews) {
    const img = document.createElement("img");
    img.src = `data:image/png;base64,${b64}`;
    img.className = "preview";
    strip.appendChild(img);
  }
}

function update(next: SessionView): void {
  view = next;
  render();
}

function send(message: Parameters<typeof encodeMessage>[0]): void {
  if (socket && socket.readyState === WebSocket.OPEN) {
    socket.send(encodeMessage(message));
  }
}

function connect(): void {
  const proto = location.protocol === "https:" ? "wss" : "ws";
  socket = new WebSocket(`${proto}://${location.host}/ws`);
  socket.onopen = () => {
    update(onConnect(view));
    // reconnecting with a live session resumes it server-side
  };
  socket.onmessage = (ev) => {
    update(applyReply(view, parseReply(String(ev.data))));
  };
  socket.onclose = () => {
    update(onDisconnect(view));
    keys.reset();
    setTimeout(connect, 1000);
  };
}

function startSessionFromFile(file: File): void {
  const reader = new FileReader();
  reader.onload = () => {
    const url = String(reader.result);
    const b64 = url.slice(url.indexOf(",") + 1);
    send({ verb: "start", session: view.session ?? "", image: b64 });
  };
  reader.readAsDataURL(file);
}

export function boot(): void {
  render();
  connect();
  byId<HTMLInputElement>("image-file").addEventListener("change", (ev) => {
    const input = ev.target as HTMLInputElement;
    if (input.files && input.files[0]) startSessionFromFile(input.files[0]);
  });
  document.addEventListener("keydown", (ev) => {
    if (!canSendKeys(view)) return;
    if ((ev.target as HTMLElement)?.tagName === "INPUT") return;
    const action = keys.keydown(ev);
    if (action && view.session) {
      ev.preventDefault();
      send({ verb: "key", session: view.session, key: action });
    }
  });
  document.addEventListener("keyup", (ev) => keys.keyup(ev));
  byId<HTMLButtonElement>("export").addEventListener("click", () => {
    const [next, go] = requestExport(view);
    update(next);
    if (go && view.session) send({ verb: "export", session: view.session });
  });
  byId<HTMLButtonElement>("reset").addEventListener("click", () => {
    if (view.session) send({ verb: "reset", session: view.session });
  });
}

boot();
