import { describe, expect, it } from "vitest";

import { ApiError, createApi } from "../src/api.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

describe("createApi", () => {
  it("lists atlases", async () => {
    const calls: string[] = [];
    const api = createApi("", async (url) => {
      calls.push(url);
      return jsonResponse(200, [
        { atlas_id: "a", views_supported: ["top"], regions: 3 },
      ]);
    });
    const atlases = await api.listAtlases();
    expect(calls).toEqual(["/api/v1/atlases"]);
    expect(atlases[0].atlas_id).toBe("a");
  });

  it("submits jobs with the documented body shape", async () => {
    let captured: { url: string; init?: RequestInit } | null = null;
    const api = createApi("http://x", async (url, init) => {
      captured = { url, init };
      return jsonResponse(201, { job_id: "deadbeefdeadbeef" });
    });
    const jobId = await api.submitJob(
      {
        atlas: "a", views: ["top"], colors: ["#000000", "#FFFFFF"],
        resolution: [64, 48], shell_alpha: 0, log_transform: false,
        log_fold_range: 1000, mode: "images",
      },
      "Image-name-unique,r\nt0,1\n",
    );
    expect(jobId).toBe("deadbeefdeadbeef");
    expect(captured!.url).toBe("http://x/api/v1/jobs");
    expect(captured!.init?.method).toBe("POST");
    const body = JSON.parse(captured!.init?.body as string);
    expect(body.csv).toContain("Image-name-unique");
    expect(body.config.atlas).toBe("a");
  });

  it("turns error bodies into ApiError with key and message", async () => {
    const api = createApi("", async () =>
      jsonResponse(400, { error: "colors[0]: bad", key: "colors[0]" }),
    );
    const err = await api
      .submitJob({} as never, "csv")
      .then(() => null, (e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(400);
    expect((err as ApiError).key).toBe("colors[0]");
    expect((err as ApiError).message).toBe("colors[0]: bad");
  });

  it("copes with non-JSON error bodies", async () => {
    const api = createApi("", async () => new Response("boom", { status: 500 }));
    const err = await api.getJob("x").then(() => null, (e: unknown) => e);
    expect((err as ApiError).message).toBe("HTTP 500");
  });

  it("escapes image URL components", () => {
    const api = createApi("", async () => jsonResponse(200, {}));
    expect(api.imageUrl("id", "a b.png")).toBe(
      "/api/v1/jobs/id/images/a%20b.png",
    );
  });
});
