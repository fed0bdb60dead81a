/**
 * Postback decoding and validation. The wire object uses the crawl-record
 * field names verbatim (dialogs, onunload_hooked, audio_autoplay,
 * popup_window_count) so ingestion downstream is a field-for-field copy.
 */

import { POSTBACK_KEY } from "./payload.js";

export type DialogKind = "alert" | "confirm" | "prompt";

export interface DialogCapture {
  kind: DialogKind;
  message: string;
}

export interface InstrumentationReport {
  page_url: string;
  dialogs: DialogCapture[];
  onunload_hooked: boolean;
  audio_autoplay: boolean;
  popup_window_count: number;
}

/** Schema violation in a postback; `field` names the offending part. */
export class PostbackError extends Error {
  constructor(public readonly field: string, message: string) {
    super(`${field}: ${message}`);
    this.name = "PostbackError";
  }
}

const REPORT_FIELDS = new Set([
  "page_url",
  "dialogs",
  "onunload_hooked",
  "audio_autoplay",
  "popup_window_count",
]);

const DIALOG_KINDS = new Set(["alert", "confirm", "prompt"]);

/**
 * Decode a serialized report (either the bare object or the postMessage
 * envelope) into a validated InstrumentationReport. Lossless: every field
 * survives a build/parse round trip unchanged.
 */
export function parsePostback(message: string): InstrumentationReport {
  let raw: unknown;
  try {
    raw = JSON.parse(message);
  } catch (err) {
    throw new PostbackError("(message)", `not valid JSON: ${(err as Error).message}`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new PostbackError("(message)", "postback must be an object");
  }
  let obj = raw as Record<string, unknown>;
  if (POSTBACK_KEY in obj) {
    const inner = obj[POSTBACK_KEY];
    if (typeof inner !== "object" || inner === null || Array.isArray(inner)) {
      throw new PostbackError(POSTBACK_KEY, "envelope payload must be an object");
    }
    obj = inner as Record<string, unknown>;
  }

  for (const field of REPORT_FIELDS) {
    if (!(field in obj)) {
      throw new PostbackError(field, "missing");
    }
  }
  for (const key of Object.keys(obj)) {
    if (!REPORT_FIELDS.has(key)) {
      throw new PostbackError(key, "unknown field");
    }
  }
  if (typeof obj.page_url !== "string") {
    throw new PostbackError("page_url", "must be a string");
  }
  if (typeof obj.onunload_hooked !== "boolean") {
    throw new PostbackError("onunload_hooked", "must be a boolean");
  }
  if (typeof obj.audio_autoplay !== "boolean") {
    throw new PostbackError("audio_autoplay", "must be a boolean");
  }
  const popups = obj.popup_window_count;
  if (typeof popups !== "number" || !Number.isInteger(popups) || popups < 0) {
    throw new PostbackError("popup_window_count", "must be a non-negative integer");
  }
  if (!Array.isArray(obj.dialogs)) {
    throw new PostbackError("dialogs", "must be an array");
  }
  const dialogs: DialogCapture[] = [];
  (obj.dialogs as unknown[]).forEach((entry, index) => {
    if (typeof entry !== "object" || entry === null) {
      throw new PostbackError(`dialogs[${index}]`, "must be an object");
    }
    const d = entry as Record<string, unknown>;
    if (typeof d.kind !== "string" || !DIALOG_KINDS.has(d.kind)) {
      throw new PostbackError(`dialogs[${index}].kind`, "must be alert, confirm, or prompt");
    }
    if (typeof d.message !== "string") {
      throw new PostbackError(`dialogs[${index}].message`, "must be a string");
    }
    for (const key of Object.keys(d)) {
      if (key !== "kind" && key !== "message") {
        throw new PostbackError(`dialogs[${index}].${key}`, "unknown field");
      }
    }
    dialogs.push({ kind: d.kind as DialogKind, message: d.message });
  });

  return {
    page_url: obj.page_url,
    dialogs,
    onunload_hooked: obj.onunload_hooked,
    audio_autoplay: obj.audio_autoplay,
    popup_window_count: popups,
  };
}
