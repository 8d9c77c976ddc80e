/**
 * Typed view of the compiled interface document and of the annotation
 * document posted back to the server. Every field mirrors the wire format;
 * nothing here adds semantics of its own.
 */

export type Side = "source" | "target";

/** Legal span start/end offsets for one side, in Unicode scalar units. */
export interface BoundaryArrays {
  starts: number[];
  ends: number[];
}

export type QuestionKind = "binary" | "scale3" | "scale5" | "textbox";

export interface IrQuestion {
  id: string;
  kind: QuestionKind;
  prompt: string;
  optional: boolean;
  /** Option labels for binary/scale kinds; absent for textbox. */
  options?: string[];
  /** Input hint for textbox kinds; absent otherwise. */
  placeholder?: string;
  /** Keyed by option index ("0", "1", ...) or "any" for textbox. */
  followups?: Record<string, IrQuestion[]>;
}

export interface IrCategory {
  name: string;
  label: string;
  color: string;
  side: Side | "both";
  selection: "single_span" | "multi_span" | "composite";
  children?: IrCategory[];
  questions?: IrQuestion[];
}

export interface IrInstance {
  id: string;
  target: string;
  source?: string;
  context?: string;
  context_before?: string;
  context_after?: string;
  /** Only sides that carry text appear here. */
  bounds: Partial<Record<Side, BoundaryArrays>>;
}

export interface IrPane {
  annotator_id: string | null;
  instance_ids: string[];
  edits: Record<string, EditData[]>;
}

export interface IrConfig {
  boundary: "char" | "whitespace" | "subword";
  mode: "full" | "selection_only" | "annotation_only";
  adjudication: number;
  language: string;
  display: string;
  instructions_display: string;
  citation?: string;
  paper_link?: string;
  demo_data_link?: string;
}

export interface InlineNode {
  type: "text" | "strong" | "emphasis" | "link" | "code" | "image";
  text?: string;
  href?: string;
  src?: string;
  alt?: string;
  children?: InlineNode[];
}

export interface BlockNode {
  type: "heading" | "paragraph" | "list" | "code_block";
  level?: number;
  ordered?: boolean;
  language?: string;
  text?: string;
  children?: InlineNode[];
  items?: InlineNode[][];
}

export interface InterfaceIR {
  ir_version: string;
  typology_name: string;
  config: IrConfig;
  selection_enabled: boolean;
  strings: Record<string, string>;
  instructions: BlockNode[];
  categories: IrCategory[];
  palette: Record<string, string>;
  panes: IrPane[];
  instances: IrInstance[];
}

// ---------------------------------------------------------------------------
// annotation document (what the UI submits)

export type AnswerValue = number | string;

export interface AnswerData {
  question_id: string;
  value: AnswerValue;
}

export type SpanPair = [number, number];

export interface EditData {
  category: string;
  spans?: Partial<Record<Side, SpanPair[]>>;
  children?: EditData[];
  answers?: AnswerData[];
}

export interface AnnotationDocument {
  format_version: "1.0";
  typology_name: string;
  annotator_id: string;
  metadata?: Record<string, unknown>;
  instances: Record<string, EditData[]>;
}

/** Sides an edit of this category must cover. */
export function requiredSides(category: IrCategory): Side[] {
  return category.side === "both" ? ["source", "target"] : [category.side];
}

/** Flat name -> category index over roots and composite children. */
export function categoryIndex(categories: IrCategory[]): Map<string, IrCategory> {
  const index = new Map<string, IrCategory>();
  for (const cat of categories) {
    index.set(cat.name, cat);
    for (const child of cat.children ?? []) {
      index.set(child.name, child);
    }
  }
  return index;
}
