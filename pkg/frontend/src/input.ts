/** Keyboard handling: the nine action keys, one message per physical
 * press (OS auto-repeat and held keys are suppressed via keyup
 * tracking). */

export const KEY_MAP: Record<string, string> = {
  w: "W",
  a: "A",
  s: "S",
  d: "D",
  ArrowUp: "Up",
  ArrowLeft: "Left",
  ArrowDown: "Down",
  ArrowRight: "Right",
  " ": "Space",
};

export interface KeyEventLike {
  key: string;
  repeat?: boolean;
}

export class KeyTracker {
  private held = new Set<string>();

  /** Action name to send, or null when the event must be ignored. */
  keydown(ev: KeyEventLike): string | null {
    const action = KEY_MAP[ev.key] ?? KEY_MAP[ev.key.toLowerCase()];
    if (!action) return null;
    if (ev.repeat) return null;
    if (this.held.has(action)) return null;
    this.held.add(action);
    return action;
  }

  keyup(ev: KeyEventLike): void {
    const action = KEY_MAP[ev.key] ?? KEY_MAP[ev.key.toLowerCase()];
    if (action) this.held.delete(action);
  }

  reset(): void {
    this.held.clear();
  }
}
