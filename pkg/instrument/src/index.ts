export { buildPayload, DEFAULT_QUIESCENCE_DELAY_MS, POSTBACK_KEY } from "./payload.js";
export type { PayloadConfig } from "./payload.js";
export { parsePostback, PostbackError } from "./report.js";
export type { DialogCapture, DialogKind, InstrumentationReport } from "./report.js";
export { toCrawlRecord } from "./record.js";
export type { CrawlRecordObject, TransportMeta } from "./record.js";
