/** Session view model.
 *
 * Everything rendered derives from server replies: the frame counter is
 * the reply's frame_count, the polyline is rebuilt/extended only from
 * reply pose lines, and queue depth comes straight off the wire. The
 * client never simulates motion.
 */

import type { SteerReply } from "./wire.js";

export interface Vertex {
  x: number;
  z: number;
}

export interface SessionView {
  session: string | null;
  connected: boolean;
  banner: string | null;
  frameCount: number;
  latestRange: [number, number];
  polyline: Vertex[];
  previews: string[]; // base64 PNG, most recent last
  queueDepth: number;
  exportInFlight: boolean;
  lastExportPath: string | null;
  lastError: string | null;
}

export const MAX_PREVIEWS = 12;

export function initialView(): SessionView {
  return {
    session: null,
    connected: false,
    banner: "not connected",
    frameCount: 0,
    latestRange: [0, 0],
    polyline: [],
    previews: [],
    queueDepth: 0,
    exportInFlight: false,
    lastExportPath: null,
    lastError: null,
  };
}

/** Pose lines are "t r00..r22 cx cy cz fx fy cx cy"; the top-down path
 * plots world (cx, cz). */
export function parsePoseVertex(line: string): Vertex {
  const parts = line.trim().split(/\s+/);
  if (parts.length !== 17) {
    throw new Error(`pose line has ${parts.length} fields, expected 17`);
  }
  return { x: Number(parts[10]), z: Number(parts[12]) };
}

export function applyReply(view: SessionView, reply: SteerReply): SessionView {
  if (reply.status === "error") {
    const detail = reply.error ? `${reply.error.kind}: ${reply.error.detail}` : "error";
    return { ...view, lastError: detail, exportInFlight: false };
  }
  const vertices = reply.poses.map(parsePoseVertex);
  // a range starting at 0 is a (re)start: the path begins anew
  const polyline = reply.frames[0] === 0 && reply.poses.length > 0
    ? vertices
    : view.polyline.concat(vertices);
  const previews = view.previews
    .concat(reply.previews)
    .slice(-MAX_PREVIEWS);
  return {
    ...view,
    session: reply.session,
    frameCount: reply.frame_count,
    latestRange: reply.frames,
    polyline,
    previews,
    queueDepth: reply.queue_depth,
    exportInFlight: reply.path !== undefined ? false : view.exportInFlight,
    lastExportPath: reply.path ?? view.lastExportPath,
    lastError: null,
  };
}

export function onConnect(view: SessionView): SessionView {
  return { ...view, connected: true, banner: null };
}

export function onDisconnect(view: SessionView): SessionView {
  return {
    ...view,
    connected: false,
    banner: "connection lost - keys disabled until reconnect",
    exportInFlight: false,
  };
}

/** Export debounce: at most one export in flight; returns whether the
 * request should actually be sent. */
export function requestExport(view: SessionView): [SessionView, boolean] {
  if (!view.connected || view.session === null || view.exportInFlight) {
    return [view, false];
  }
  return [{ ...view, exportInFlight: true }, true];
}

export function canSendKeys(view: SessionView): boolean {
  return view.connected && view.session !== null;
}
