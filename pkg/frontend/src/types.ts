// Payload shapes of the docqa HTTP API.

export interface CategoricalField {
  kind: "categorical";
  values: string[];
}

export interface RangeField {
  kind: "real" | "timestamp";
  min?: number | string;
  max?: number | string;
}

export type SchemaField = CategoricalField | RangeField;
export type Schema = Record<string, SchemaField>;

export type RangeBody = { min?: number | string; max?: number | string };
export type FilterBody = Record<string, string[] | RangeBody>;

export type Mode = "best_fit" | "multi_doc";

export interface AskRequest {
  question: string;
  filters?: FilterBody;
  k?: number;
  mode?: Mode;
}

export interface RetrievedEntry {
  doc_id: string;
  score: number;
}

export interface AskResponse {
  answer_text: string;
  doc_id: string;
  char_start: number;
  char_end: number;
  reader_score: number;
  retrieved: RetrievedEntry[];
}

export interface DocumentView {
  id: string;
  title: string;
  text: string;
  metadata: Record<string, string | number>;
}
