import { describe, expect, it } from "vitest";

import { MAX_UPLOAD_BYTES, precheckUpload } from "../src/upload.js";

function csvFile(name: string, bytes: number): File {
  return new File([new Uint8Array(bytes)], name, { type: "text/csv" });
}

describe("precheckUpload", () => {
  it("accepts a small csv with a name", () => {
    const verdict = precheckUpload("obesity", csvFile("obesity.csv", 120));
    expect(verdict).toEqual({ ok: true });
  });

  it("accepts a file exactly at the size limit", () => {
    const verdict = precheckUpload("big", csvFile("big.csv", MAX_UPLOAD_BYTES));
    expect(verdict).toEqual({ ok: true });
  });

  it("rejects a file one byte over the limit", () => {
    const verdict = precheckUpload("big", csvFile("big.csv", MAX_UPLOAD_BYTES + 1));
    expect(verdict.ok).toBe(false);
    if (!verdict.ok) {
      expect(verdict.reason).toContain("10");
    }
  });

  it("requires a layer name", () => {
    const verdict = precheckUpload("   ", csvFile("data.csv", 10));
    expect(verdict.ok).toBe(false);
    if (!verdict.ok) {
      expect(verdict.reason.toLowerCase()).toContain("name");
    }
  });

  it("requires a file", () => {
    const verdict = precheckUpload("layer", null);
    expect(verdict.ok).toBe(false);
  });

  it("rejects an empty file", () => {
    const verdict = precheckUpload("layer", csvFile("empty.csv", 0));
    expect(verdict.ok).toBe(false);
  });

  it("tells Excel users to convert instead of uploading", () => {
    const verdict = precheckUpload("sheet", csvFile("data.xlsx", 50));
    expect(verdict.ok).toBe(false);
    if (!verdict.ok) {
      expect(verdict.reason).toContain("not supported in this build");
      expect(verdict.reason.toLowerCase()).toContain("csv");
    }
  });

  it("rejects other extensions", () => {
    const verdict = precheckUpload("layer", csvFile("data.txt", 50));
    expect(verdict.ok).toBe(false);
  });

  it("accepts uppercase .CSV", () => {
    const verdict = precheckUpload("layer", csvFile("DATA.CSV", 50));
    expect(verdict).toEqual({ ok: true });
  });
});
