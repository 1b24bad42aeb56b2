// Client-side gate for the upload form. The server is the authority; these
// checks only catch the obvious rejections before any bytes leave the
// browser, mirroring the server's limits.

export const MAX_UPLOAD_BYTES = 10 * 2 ** 20;

export type Precheck = { ok: true } | { ok: false; reason: string };

export function precheckUpload(name: string, file: File | null): Precheck {
  if (name.trim() === "") {
    return { ok: false, reason: "a layer name is required" };
  }
  if (file === null) {
    return { ok: false, reason: "choose a CSV file to upload" };
  }
  const lower = file.name.toLowerCase();
  if (lower.endsWith(".xlsx") || lower.endsWith(".xls")) {
    return {
      ok: false,
      reason:
        "Excel files are not supported in this build; convert the file to CSV",
    };
  }
  if (!lower.endsWith(".csv")) {
    return { ok: false, reason: `expected a .csv file, got "${file.name}"` };
  }
  if (file.size > MAX_UPLOAD_BYTES) {
    return { ok: false, reason: "the file exceeds the 10MB upload limit" };
  }
  if (file.size === 0) {
    return { ok: false, reason: "the file is empty" };
  }
  return { ok: true };
}
