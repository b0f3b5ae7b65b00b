/** Capture session: turns editor input into debounced, ordered event batches.
 *
 * Every input action is queued immediately with its own timestamp (so the
 * typing rhythm survives batching) and the queue is flushed after a quiet
 * period of at most 500 ms. Only one batch is in flight at a time; on an
 * out-of-order conflict the unacknowledged events are requeued once and
 * resent from the last acknowledged point.
 */

import { ApiError } from "./api.js";
import type { IngestResponse, WireEvent } from "./types.js";

export interface CaptureOptions {
  send: (events: WireEvent[]) => Promise<IngestResponse>;
  debounceMs?: number;
  now?: () => number; // epoch milliseconds
  onSpeed?: (cpm: number) => void;
  onError?: (error: unknown) => void;
}

const MAX_DEBOUNCE_MS = 500;

export class CaptureSession {
  private readonly send: (events: WireEvent[]) => Promise<IngestResponse>;
  private readonly debounceMs: number;
  private readonly now: () => number;
  private readonly onSpeed: (cpm: number) => void;
  private readonly onError: (error: unknown) => void;

  private queue: WireEvent[] = [];
  private inflight: Promise<void> | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private lastTimestampMs = 0;
  private retried = false;

  constructor(options: CaptureOptions) {
    this.send = options.send;
    this.debounceMs = Math.min(options.debounceMs ?? 300, MAX_DEBOUNCE_MS);
    this.now = options.now ?? Date.now;
    this.onSpeed = options.onSpeed ?? (() => {});
    this.onError = options.onError ?? (() => {});
  }

  /** Queue a typed-input snapshot. */
  noteTyped(fullText: string): void {
    this.push({ ts: this.nextTimestamp(), text: fullText, paste: false });
  }

  /** Queue a paste (or drag-and-drop) snapshot with its payload. */
  notePaste(fullText: string, pasted: string): void {
    this.push({ ts: this.nextTimestamp(), text: fullText, paste: true, pasted });
  }

  get pendingCount(): number {
    return this.queue.length;
  }

  /** Send everything queued and wait until the wire is quiet. */
  async flush(): Promise<void> {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    while (this.inflight !== null || this.queue.length > 0) {
      if (this.inflight === null) {
        this.startBatch();
      }
      await this.inflight;
    }
  }

  private push(event: WireEvent): void {
    this.queue.push(event);
    if (this.timer === null && this.inflight === null) {
      this.timer = setTimeout(() => {
        this.timer = null;
        this.startBatch();
      }, this.debounceMs);
    }
  }

  private startBatch(): void {
    if (this.queue.length === 0) {
      return;
    }
    const batch = this.queue;
    this.queue = [];
    this.inflight = this.send(batch)
      .then((response) => {
        this.retried = false;
        this.onSpeed(response.typing_speed_cpm);
      })
      .catch((error) => {
        if (error instanceof ApiError && error.status === 409 && !this.retried) {
          // Resync: everything unacknowledged goes back in order.
          this.retried = true;
          this.queue = [...batch, ...this.queue];
        } else {
          this.onError(error);
        }
      })
      .finally(() => {
        this.inflight = null;
        if (this.queue.length > 0 && this.timer === null) {
          this.startBatch();
        }
      });
  }

  /** Monotone wall-clock timestamps: equal is fine, backwards is not. */
  private nextTimestamp(): string {
    const ms = Math.max(this.now(), this.lastTimestampMs);
    this.lastTimestampMs = ms;
    return new Date(ms).toISOString();
  }
}
