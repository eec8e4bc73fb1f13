/** Typed client for the render service REST API. */

export interface AtlasInfo {
  atlas_id: string;
  views_supported: string[];
  regions: number;
}

export interface JobConfig {
  atlas: string;
  views: string[];
  colors: string[];
  resolution: [number, number];
  shell_alpha: number;
  log_transform: boolean;
  log_fold_range: number;
  mode: "images" | "montage" | "animation";
  fpt?: number;
  delay_cs?: number;
  animation_view?: string;
}

export interface JobRecord {
  job_id: string;
  status: "queued" | "running" | "done" | "error";
  submitted_at: string;
  images: string[];
  error_message: string | null;
}

/** Non-2xx response; `key` carries the server's config key-path diagnostic. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly key?: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (
  url: string,
  init?: RequestInit,
) => Promise<Response>;

export interface Api {
  listAtlases(): Promise<AtlasInfo[]>;
  submitJob(config: JobConfig, csv: string): Promise<string>;
  getJob(jobId: string): Promise<JobRecord>;
  imageUrl(jobId: string, name: string): string;
  fetchImage(jobId: string, name: string): Promise<ArrayBuffer>;
}

async function errorFrom(response: Response): Promise<ApiError> {
  let message = `HTTP ${response.status}`;
  let key: string | undefined;
  try {
    const body = await response.json();
    if (typeof body?.error === "string") message = body.error;
    if (typeof body?.key === "string") key = body.key;
  } catch {
    /* non-JSON error body; keep the status line */
  }
  return new ApiError(response.status, message, key);
}

export function createApi(baseUrl = "", fetchFn?: FetchLike): Api {
  const doFetch: FetchLike = fetchFn ?? ((url, init) => fetch(url, init));
  const url = (path: string) => `${baseUrl}${path}`;

  return {
    async listAtlases() {
      const response = await doFetch(url("/api/v1/atlases"));
      if (!response.ok) throw await errorFrom(response);
      return (await response.json()) as AtlasInfo[];
    },

    async submitJob(config, csv) {
      const response = await doFetch(url("/api/v1/jobs"), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ config, csv }),
      });
      if (response.status !== 201) throw await errorFrom(response);
      const body = (await response.json()) as { job_id: string };
      return body.job_id;
    },

    async getJob(jobId) {
      const response = await doFetch(url(`/api/v1/jobs/${jobId}`));
      if (!response.ok) throw await errorFrom(response);
      return (await response.json()) as JobRecord;
    },

    imageUrl(jobId, name) {
      return url(
        `/api/v1/jobs/${encodeURIComponent(jobId)}/images/${encodeURIComponent(name)}`,
      );
    },

    async fetchImage(jobId, name) {
      const response = await doFetch(this.imageUrl(jobId, name));
      if (!response.ok) throw await errorFrom(response);
      return response.arrayBuffer();
    },
  };
}
