import { describe, expect, it } from "vitest";

import { hashNoteFor, renderGalleryHTML } from "../src/gallery.js";

describe("renderGalleryHTML", () => {
  it("renders an inline image and a download link per result", () => {
    const html = renderGalleryHTML([
      { name: "render_t0_top.png", url: "/api/v1/jobs/x/images/render_t0_top.png" },
      { name: "render_t1_top.png", url: "/api/v1/jobs/x/images/render_t1_top.png" },
    ]);
    expect(html.match(/<img /g)).toHaveLength(2);
    expect(html).toContain('download="render_t0_top.png"');
    expect(html).toContain('src="/api/v1/jobs/x/images/render_t0_top.png"');
  });

  it("marks GIFs so the animation styling applies (native loop playback)", () => {
    const html = renderGalleryHTML([
      { name: "render_top.gif", url: "/x/render_top.gif" },
    ]);
    expect(html).toContain('class="animation"');
    expect(html).toContain("<img ");
  });

  it("escapes names", () => {
    const html = renderGalleryHTML([
      { name: '<script>"x"</script>.png', url: "/y" },
    ]);
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
  });

  it("shows the empty state", () => {
    expect(renderGalleryHTML([])).toContain("No images");
  });

  it("prepends the hash note when given", () => {
    const html = renderGalleryHTML(
      [{ name: "a.png", url: "/a" }],
      "Identical to the previous run (image hashes match).",
    );
    expect(html).toContain("hash-note");
    expect(html).toContain("hashes match");
  });
});

describe("hashNoteFor", () => {
  it("is silent without a comparable previous run", () => {
    expect(hashNoteFor({ comparable: false, allMatch: false, mismatched: [] }))
      .toBeNull();
  });

  it("reports matches and mismatches", () => {
    expect(hashNoteFor({ comparable: true, allMatch: true, mismatched: [] }))
      .toMatch(/match/);
    expect(
      hashNoteFor({ comparable: true, allMatch: false, mismatched: ["a.png"] }),
    ).toContain("a.png");
  });
});
