/** Fixed-capacity FIFO ring buffer; pushing past capacity drops the oldest
 * entry, so memory stays bounded no matter how long a session runs. */
export class RingBuffer<T> {
  private items: (T | undefined)[];
  private start = 0;
  private count = 0;

  constructor(readonly capacity: number) {
    if (!Number.isInteger(capacity) || capacity <= 0) {
      throw new RangeError(`capacity must be a positive integer, got ${capacity}`);
    }
    this.items = new Array<T | undefined>(capacity);
  }

  get length(): number {
    return this.count;
  }

  push(item: T): void {
    const end = (this.start + this.count) % this.capacity;
    this.items[end] = item;
    if (this.count < this.capacity) {
      this.count += 1;
    } else {
      this.start = (this.start + 1) % this.capacity;
    }
  }

  /** Element by age: index 0 is the oldest retained entry. */
  at(i: number): T {
    if (!Number.isInteger(i) || i < 0 || i >= this.count) {
      throw new RangeError(`index ${i} out of range for length ${this.count}`);
    }
    return this.items[(this.start + i) % this.capacity] as T;
  }

  last(): T | null {
    return this.count === 0 ? null : this.at(this.count - 1);
  }

  /** Snapshot oldest-to-newest; safe for the caller to keep. */
  toArray(): T[] {
    const out: T[] = new Array(this.count);
    for (let i = 0; i < this.count; i++) out[i] = this.at(i);
    return out;
  }

  clear(): void {
    this.items = new Array<T | undefined>(this.capacity);
    this.start = 0;
    this.count = 0;
  }
}
