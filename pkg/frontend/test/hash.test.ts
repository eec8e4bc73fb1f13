import { describe, expect, it } from "vitest";

import { compareHashes, sha256Hex } from "../src/hash.js";

describe("sha256Hex", () => {
  it("matches the known digest of 'abc'", async () => {
    const data = new TextEncoder().encode("abc");
    expect(await sha256Hex(data.buffer as ArrayBuffer)).toBe(
      "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad",
    );
  });
});

describe("compareHashes", () => {
  const base = new Map([
    ["a.png", "h1"],
    ["b.png", "h2"],
  ]);

  it("is not comparable without a previous run", () => {
    expect(compareHashes(null, base).comparable).toBe(false);
  });

  it("is not comparable when image names differ", () => {
    const other = new Map([["c.png", "h1"]]);
    expect(compareHashes(base, other).comparable).toBe(false);
  });

  it("reports a full match", () => {
    const result = compareHashes(base, new Map(base));
    expect(result).toEqual({ comparable: true, allMatch: true, mismatched: [] });
  });

  it("names mismatched images", () => {
    const changed = new Map([
      ["a.png", "h1"],
      ["b.png", "DIFFERENT"],
    ]);
    const result = compareHashes(base, changed);
    expect(result.comparable).toBe(true);
    expect(result.allMatch).toBe(false);
    expect(result.mismatched).toEqual(["b.png"]);
  });
});
