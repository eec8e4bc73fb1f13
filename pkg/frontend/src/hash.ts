/** Image hashing so determinism is visible to the user: resubmitting an
 * unchanged form should report matching hashes. */

export async function sha256Hex(data: ArrayBuffer): Promise<string> {
  const digest = await crypto.subtle.digest("SHA-256", data);
  return Array.from(new Uint8Array(digest))
    .map((b) => b.toString(16).padStart(2, "0"))
    .join("");
}

export type HashesByName = Map<string, string>;

export interface HashComparison {
  comparable: boolean; // a previous run with the same image names exists
  allMatch: boolean;
  mismatched: string[];
}

export function compareHashes(
  previous: HashesByName | null,
  current: HashesByName,
): HashComparison {
  const sameNames =
    previous !== null &&
    previous.size === current.size &&
    [...current.keys()].every((name) => previous.has(name));
  if (!previous || !sameNames) {
    return { comparable: false, allMatch: false, mismatched: [] };
  }
  const mismatched = [...current]
    .filter(([name, hash]) => previous.get(name) !== hash)
    .map(([name]) => name);
  return {
    comparable: true,
    allMatch: mismatched.length === 0,
    mismatched,
  };
}
