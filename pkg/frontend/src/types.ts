// Shapes of the /v1 JSON API documents the console consumes.

export type Design = "crm" | "efftox";

export interface CrmDoseRow {
  Dose: number;
  Skeleton: number;
  N: number;
  Tox: number;
  ProbTox: number;
  MedianProbTox: number;
  ProbMTD: number;
}

export interface EffToxDoseRow {
  Dose: number;
  N: number;
  ProbEff: number;
  ProbTox: number;
  ProbAccEff: number;
  ProbAccTox: number;
  Utility: number;
  Acceptable: boolean;
  ProbOBD: number;
}

export interface FitReport {
  design: Design;
  seed: number;
  doses: Array<CrmDoseRow | EffToxDoseRow>;
  recommended_dose: number | null;
  entropy: number;
  target?: number;
  modal_mtd?: number;
  modal_obd?: number;
  diagnostics: Record<string, { split_rhat: number; ess: number }>;
}

export interface SessionLatest {
  fit: FitReport;
  recommendation: number | null;
}

export interface SessionDoc {
  session_id: string;
  design: Design;
  spec: Record<string, unknown>;
  policy: Record<string, unknown>;
  seed: number;
  revision: number;
  outcome_history: string[];
  outcome_string: string;
  latest: SessionLatest | null;
}

export interface FitSummary {
  dose_levels: number[];
  recommended_dose: number | null;
  entropy: number;
  prob_tox?: number[];
  median_prob_tox?: number[];
  prob_mtd?: number[];
  prob_eff?: number[];
  prob_acc_eff?: number[];
  prob_acc_tox?: number[];
  utility?: number[];
  acceptable?: boolean[];
  prob_obd?: number[];
}

export interface DtpNode {
  node: number;
  parent: number | null;
  depth: number;
  outcomes: string;
  dose_given: number | null;
  next_dose: number | null;
  color: string;
  fit_summary: FitSummary;
  prob_obd_delta?: number[];
  prob_mtd_delta?: number[];
}

export interface DtpDoc {
  design: Design;
  cohort_sizes: number[];
  nodes: DtpNode[];
  edges: Array<{ from: number; to: number; label: string }>;
  seed?: number;
  session_id?: string;
}

export interface ContourDosePoint {
  dose_level: number;
  prob_eff: number;
  prob_tox: number;
  utility: number;
}

export interface ContourDoc {
  prob_eff: number[];
  prob_tox: number[];
  utility: number[][];
  dose_points: ContourDosePoint[];
  seed?: number;
  session_id?: string;
}

export interface ApiError {
  error: string;
  detail?: unknown;
  node_count?: number;
  budget?: number;
  revision?: number;
}
