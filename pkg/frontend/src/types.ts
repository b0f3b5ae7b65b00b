/** Shared wire types for the writer-integrity HTTP API. */

export interface WireEvent {
  ts: string; // ISO-8601 with milliseconds
  text: string; // full editor content after the action
  paste: boolean;
  pasted?: string; // present iff paste
}

export interface IngestResponse {
  accepted: number;
  typing_speed_cpm: number;
}

export interface DocumentRow {
  document_id: number;
  name: string;
  created: string;
  modified: string;
  certificate_id: string | null;
}

export interface DocumentDetail extends DocumentRow {
  content: string;
}

export interface SaveResponse {
  certificate_id: string;
  stats_line: string;
}

export interface CertificateView {
  certificate_id: string;
  document_name: string;
  author: string;
  issued_at: string;
  stats_line: string;
  log_lines: string[];
}
