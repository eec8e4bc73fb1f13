/** Inline result gallery, rendered as an HTML string (pure, testable). */

export interface GalleryImage {
  name: string;
  url: string;
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderGalleryHTML(
  images: GalleryImage[],
  hashNote: string | null = null,
): string {
  if (images.length === 0) {
    return `<p class="empty">No images produced.</p>`;
  }
  const note = hashNote
    ? `<p class="hash-note">${escapeHtml(hashNote)}</p>`
    : "";
  const figures = images
    .map((image) => {
      const name = escapeHtml(image.name);
      const url = escapeHtml(image.url);
      const isGif = image.name.toLowerCase().endsWith(".gif");
      const kind = isGif ? ` class="animation"` : "";
      return (
        `<figure${kind}>` +
        `<img src="${url}" alt="${name}" loading="lazy">` +
        `<figcaption><a href="${url}" download="${name}">${name}</a></figcaption>` +
        `</figure>`
      );
    })
    .join("\n");
  return `${note}<div class="gallery-grid">${figures}</div>`;
}

export function hashNoteFor(comparison: {
  comparable: boolean;
  allMatch: boolean;
  mismatched: string[];
}): string | null {
  if (!comparison.comparable) return null;
  if (comparison.allMatch) {
    return "Identical to the previous run (image hashes match).";
  }
  return `Differs from the previous run: ${comparison.mismatched.join(", ")}`;
}
