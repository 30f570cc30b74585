// Wire shapes, exactly as the session service emits them.

export interface AttributeDict {
  name: string;
  typeName: string;
}

export interface ClassDict {
  name: string;
  attributes: AttributeDict[];
}

export type EdgeKind = "association" | "aggregation" | "composition" | "inheritance";

export interface AssociationDict {
  source: string;
  target: string;
  kind: EdgeKind;
  name: string | null;
}

export interface ModelDict {
  packageName: string;
  classes: ClassDict[];
  associations: AssociationDict[];
}

export interface ClassPayloadDict {
  name: string;
  companionPairs: [string, string][];
}

export interface AttributePayloadDict {
  className: string;
  name: string;
  typeName: string | null;
  typeWarning: string | null;
}

export interface AssociationPayloadDict {
  source: string;
  target: string;
  kind: EdgeKind;
  name: string | null;
}

export interface CandidateDict<P> {
  candidateId: string;
  kind: "class" | "attribute" | "association";
  confidence: number;
  payload: P;
}

export interface SuggestionsDict {
  classes: CandidateDict<ClassPayloadDict>[];
  attributes: CandidateDict<AttributePayloadDict>[];
  associations: CandidateDict<AssociationPayloadDict>[];
  errors: string[];
}

export type ModeName = "NoAssistance" | "Automatic" | "OnRequest" | "AtEnd";

export const ALL_MODES: ModeName[] = ["NoAssistance", "Automatic", "OnRequest", "AtEnd"];

export interface SessionSnapshot {
  revision: number;
  mode: ModeName;
  ended: boolean;
  model: ModelDict;
}

export interface EditBody {
  kind: string;
  name?: string;
  className?: string;
  typeName?: string;
  source?: string;
  target?: string;
  associationKind?: string;
  label?: string;
}
