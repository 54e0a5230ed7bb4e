export interface TaxonomySubcategory {
  label: string;
  examples: string;
}

export interface TaxonomyCategory {
  name: string;
  subcategories: TaxonomySubcategory[];
}

export interface TaxonomyDoc {
  version: string;
  categories: TaxonomyCategory[];
}

export interface HarmEntry {
  present: boolean;
  description?: string;
}

export const HARM_KINDS = [
  "physical",
  "environmental",
  "property",
  "psychological",
  "reputational",
  "economic",
  "legal_regulatory",
  "human_rights",
] as const;

export type HarmKind = (typeof HARM_KINDS)[number];

export interface LocationEntry {
  country: string;
  region?: string;
}

/** Canonical incident document as served/accepted by the API. */
export interface IncidentDocument {
  incident_id?: string;
  incident_title: string;
  incident_summary: string;
  incident_date: string | null;
  incident_locations: LocationEntry[];
  affected_parties: string[];
  sectors_impacted: string[];
  incident_issues: string[];
  ai_application_names: string[];
  application_version: string | null;
  application_technologies: string[];
  application_purposes: string[];
  application_deployer: string | null;
  application_developer: string | null;
  application_transparency: { level: string; note?: string };
  incident_severity: string | null;
  incident_causes: string[];
  harms: Record<HarmKind, HarmEntry>;
  incident_link: string | null;
  submitter_name?: string;
  submitter_email?: string;
  incident_news_sources?: string[];
  submitter_extra_info?: string;
}

export const REDACTED_FIELDS = [
  "submitter_name",
  "submitter_email",
  "incident_news_sources",
  "submitter_extra_info",
] as const;

export interface Violation {
  field_path: string;
  code: string;
  message: string;
}

export interface ReviewEventObj {
  incident_id: string;
  action: string;
  reviewer_id: string;
  reason: string;
  at: string;
}

export interface IncidentEnvelope {
  incident_id: string;
  state: string;
  record: IncidentDocument;
  events?: ReviewEventObj[];
}

export interface ListResponse {
  items: IncidentEnvelope[];
  next_cursor: string | null;
}
