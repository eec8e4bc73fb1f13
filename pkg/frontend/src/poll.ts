/** Submit-and-poll flow: one in-flight poll per job, visible phases. */

import { Api, ApiError, JobConfig, JobRecord } from "./api.js";

export type Phase =
  | { kind: "submitting" }
  | { kind: "waiting"; jobId: string; status: "queued" | "running" }
  | { kind: "done"; jobId: string; images: string[] }
  | { kind: "fieldError"; key: string | undefined; message: string }
  | { kind: "busy"; message: string }
  | { kind: "network"; message: string }
  | { kind: "failed"; message: string };

export interface PollOptions {
  intervalMs?: number;
  timeoutMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) =>
  new Promise<void>((resolve) => setTimeout(resolve, ms));

/** POST the job, then poll its status every second until a terminal
 * state; every transition is reported through onPhase.  Resolves with the
 * image names on success, null otherwise (the failure already surfaced
 * as a phase). */
export async function submitAndPoll(
  api: Api,
  config: JobConfig,
  csv: string,
  onPhase: (phase: Phase) => void,
  options: PollOptions = {},
): Promise<{ jobId: string; images: string[] } | null> {
  const intervalMs = options.intervalMs ?? 1000;
  const timeoutMs = options.timeoutMs ?? 10 * 60 * 1000;
  const sleep = options.sleep ?? defaultSleep;

  onPhase({ kind: "submitting" });
  let jobId: string;
  try {
    jobId = await api.submitJob(config, csv);
  } catch (error) {
    onPhase(classifySubmitError(error));
    return null;
  }

  const deadline = Date.now() + timeoutMs;
  for (;;) {
    let record: JobRecord;
    try {
      record = await api.getJob(jobId);
    } catch (error) {
      onPhase({
        kind: "network",
        message: error instanceof Error ? error.message : String(error),
      });
      return null;
    }
    if (record.status === "done") {
      onPhase({ kind: "done", jobId, images: record.images });
      return { jobId, images: record.images };
    }
    if (record.status === "error") {
      onPhase({
        kind: "failed",
        message: record.error_message ?? "render failed",
      });
      return null;
    }
    onPhase({ kind: "waiting", jobId, status: record.status });
    if (Date.now() >= deadline) {
      onPhase({ kind: "failed", message: "timed out waiting for the job" });
      return null;
    }
    await sleep(intervalMs);
  }
}

export function classifySubmitError(error: unknown): Phase {
  if (error instanceof ApiError) {
    if (error.status === 503) {
      return { kind: "busy", message: error.message };
    }
    if (error.status === 400 || error.status === 413) {
      return { kind: "fieldError", key: error.key, message: error.message };
    }
    return { kind: "failed", message: error.message };
  }
  // fetch() rejections (connection refused, DNS, ...) land here
  return {
    kind: "network",
    message: error instanceof Error ? error.message : String(error),
  };
}
