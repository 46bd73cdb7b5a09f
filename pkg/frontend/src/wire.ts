/** JSON message shapes shared with the steering service. */

export type Verb = "start" | "key" | "reset" | "export";

export interface SteerMessage {
  verb: Verb;
  session: string;
  key?: string;
  image?: string; // base64 PNG
  path?: string;
}

export interface SteerError {
  kind: string;
  detail: string;
}

export interface SteerReply {
  session: string;
  status: "ok" | "error";
  frames: [number, number];
  frame_count: number;
  poses: string[];
  previews: string[]; // base64 PNG
  queue_depth: number;
  path?: string;
  error?: SteerError;
}

export function encodeMessage(msg: SteerMessage): string {
  const payload: Record<string, unknown> = {
    verb: msg.verb,
    session: msg.session,
  };
  if (msg.key !== undefined) payload.key = msg.key;
  if (msg.image !== undefined) payload.image = msg.image;
  if (msg.path !== undefined) payload.path = msg.path;
  return JSON.stringify(payload);
}

export function parseReply(raw: string): SteerReply {
  const data = JSON.parse(raw) as Partial<SteerReply>;
  if (typeof data.session !== "string" || typeof data.frame_count !== "number") {
    throw new Error("malformed steering reply");
  }
  return {
    session: data.session,
    status: data.status === "error" ? "error" : "ok",
    frames: Array.isArray(data.frames)
      ? [Number(data.frames[0]), Number(data.frames[1])]
      : [0, 0],
    frame_count: data.frame_count,
    poses: Array.isArray(data.poses) ? data.poses.map(String) : [],
    previews: Array.isArray(data.previews) ? data.previews.map(String) : [],
    queue_depth: typeof data.queue_depth === "number" ? data.queue_depth : 0,
    path: typeof data.path === "string" ? data.path : undefined,
    error: data.error as SteerError | undefined,
  };
}
