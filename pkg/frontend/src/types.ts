// Wire types mirroring the session service API.

export type FactorBlocks = {
  A: number[][];
  B: number[][];
  C: number[][];
  D: number[][];
};

export type RoundAttemptInfo = {
  ok: boolean;
  message: string;
  iteration: number;
  path?: string;
  residual_norm_sq?: string;
};

export type SessionSnapshot = {
  n: number;
  rank: number;
  p: number;
  q: number;
  busy: boolean;
  last_error: string | null;
  iteration: number;
  objective: number;
  sparsity: number;
  seed: number;
  factors: FactorBlocks;
  last_round_attempt: RoundAttemptInfo | null;
  history: { iter: number; objective: number; sparsity: number }[];
};

export type StreamEvent =
  | { iter: number; objective: number; sparsity: number; phase?: number }
  | { gap: true }
  | { closed: true };

export type StepCommand = {
  type: "step";
  iterations: number;
  lambda: number;
  zeros: number;
};

export type RoundCommand = {
  type: "round";
  value_set: string[];
  tol: number;
};

export type SessionCommand =
  | StepCommand
  | RoundCommand
  | { type: "project" }
  | { type: "reset"; seed: number }
  | { type: "load"; file: string }
  | { type: "save"; file: string };

export type CommandResult =
  | { kind: "accepted" }
  | { kind: "busy"; reason: string }
  | { kind: "invalid"; reason: string }
  | { kind: "failed"; reason: string };
