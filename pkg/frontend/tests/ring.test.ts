import { describe, expect, it } from "vitest";
import { RingBuffer } from "../src/ring.js";

describe("RingBuffer", () => {
  it("rejects non-positive or fractional capacity", () => {
    expect(() => new RingBuffer(0)).toThrow(RangeError);
    expect(() => new RingBuffer(-3)).toThrow(RangeError);
    expect(() => new RingBuffer(2.5)).toThrow(RangeError);
  });

  it("keeps insertion order below capacity", () => {
    const rb = new RingBuffer<number>(4);
    rb.push(1);
    rb.push(2);
    rb.push(3);
    expect(rb.length).toBe(3);
    expect(rb.toArray()).toEqual([1, 2, 3]);
    expect(rb.at(0)).toBe(1);
    expect(rb.last()).toBe(3);
  });

  it("overwrites the oldest entries once full", () => {
    const rb = new RingBuffer<number>(3);
    for (const v of [1, 2, 3, 4, 5]) rb.push(v);
    expect(rb.length).toBe(3);
    expect(rb.toArray()).toEqual([3, 4, 5]);
    expect(rb.at(0)).toBe(3);
    expect(rb.last()).toBe(5);
  });

  it("stays bounded under sustained pushes", () => {
    const rb = new RingBuffer<number>(600);
    for (let i = 0; i < 5000; i++) rb.push(i);
    expect(rb.length).toBe(600);
    expect(rb.at(0)).toBe(4400);
    expect(rb.last()).toBe(4999);
  });

  it("range-checks at()", () => {
    const rb = new RingBuffer<number>(2);
    rb.push(7);
    expect(() => rb.at(1)).toThrow(RangeError);
    expect(() => rb.at(-1)).toThrow(RangeError);
    expect(() => rb.at(0.5)).toThrow(RangeError);
  });

  it("clear empties without changing capacity", () => {
    const rb = new RingBuffer<number>(3);
    rb.push(1);
    rb.push(2);
    rb.clear();
    expect(rb.length).toBe(0);
    expect(rb.last()).toBeNull();
    rb.push(9);
    expect(rb.toArray()).toEqual([9]);
    expect(rb.capacity).toBe(3);
  });
});
