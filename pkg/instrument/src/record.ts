/**
 * Composition of a full crawl record from an instrumentation report plus the
 * transport-side metadata the driver knows (IDs, timing, redirects, body).
 * The result matches the pipeline's line-delimited crawl-record schema, so
 * it can be written straight into a corpus file.
 */

import { InstrumentationReport } from "./report.js";

export interface TransportMeta {
  record_id: string;
  seed_url: string;
  vantage: string;
  /** ISO-8601 UTC, e.g. "2015-09-01T00:00:00Z" */
  observed_at: string;
  http_status: number;
  redirect_chain?: string[];
  html: string;
  scripts?: string[];
}

export interface CrawlRecordObject {
  record_id: string;
  seed_url: string;
  final_url: string;
  vantage: string;
  observed_at: string;
  http_status: number;
  redirect_chain: string[];
  html: string;
  scripts: string[];
  dialogs: { kind: string; message: string; ordinal: number }[];
  onunload_hooked: boolean;
  audio_autoplay: boolean;
  popup_window_count: number;
}

export function toCrawlRecord(report: InstrumentationReport, meta: TransportMeta): CrawlRecordObject {
  let chain = meta.redirect_chain ?? [meta.seed_url, report.page_url];
  if (chain.length > 0 && chain[chain.length - 1] !== report.page_url) {
    chain = [...chain, report.page_url];
  }
  return {
    record_id: meta.record_id,
    seed_url: meta.seed_url,
    final_url: report.page_url,
    vantage: meta.vantage,
    observed_at: meta.observed_at,
    http_status: meta.http_status,
    redirect_chain: chain,
    html: meta.html,
    scripts: meta.scripts ?? [],
    dialogs: report.dialogs.map((d, index) => ({ kind: d.kind, message: d.message, ordinal: index + 1 })),
    onunload_hooked: report.onunload_hooked,
    audio_autoplay: report.audio_autoplay,
    popup_window_count: report.popup_window_count,
  };
}
