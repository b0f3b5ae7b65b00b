/** Single-tab editing guard.
 *
 * One browser tab at a time may hold a document open for editing. The lock
 * is a localStorage record with a heartbeat; a second tab sees a fresh
 * heartbeat from another holder and refuses to open the editor.
 */

const HEARTBEAT_MS = 2000;
const STALE_MS = 6000;

interface LockRecord {
  holder: string;
  beatAt: number;
}

export class TabLock {
  private readonly key: string;
  private readonly holder: string;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(documentId: number, private readonly storage: Storage) {
    this.key = `wi-editing-${documentId}`;
    this.holder = Math.random().toString(36).slice(2);
  }

  /** Try to take the lock; false means another live tab holds it. */
  acquire(): boolean {
    const current = this.read();
    if (current && current.holder !== this.holder && Date.now() - current.beatAt < STALE_MS) {
      return false;
    }
    this.beat();
    this.timer = setInterval(() => this.beat(), HEARTBEAT_MS);
    return true;
  }

  release(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
    const current = this.read();
    if (current && current.holder === this.holder) {
      this.storage.removeItem(this.key);
    }
  }

  private beat(): void {
    const record: LockRecord = { holder: this.holder, beatAt: Date.now() };
    this.storage.setItem(this.key, JSON.stringify(record));
  }

  private read(): LockRecord | null {
    const raw = this.storage.getItem(this.key);
    if (!raw) {
      return null;
    }
    try {
      return JSON.parse(raw) as LockRecord;
    } catch {
      return null;
    }
  }
}
