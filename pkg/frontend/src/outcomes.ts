// Client-side outcome grammar validation, equivalent to the server's parser.
// Both sides are pinned to the same test corpus; never submit a cohort the
// server would reject.

export type AlphabetName = "binary" | "quaternary";

const LETTERS: Record<AlphabetName, string> = {
  binary: "TN",
  quaternary: "ETBN",
};

const TOKEN = /^(\d+)([A-Z]*)$/;

export interface ParsedPatient {
  doseLevel: number;
  event: string;
}

export type ParseResult =
  | { ok: true; patients: ParsedPatient[] }
  | { ok: false; error: string };

export function parseOutcomes(text: string, alphabet: AlphabetName): ParseResult {
  const letters = LETTERS[alphabet];
  const patients: ParsedPatient[] = [];
  const tokens = text.split(/\s+/u).filter((t) => t.length > 0);
  for (let i = 0; i < tokens.length; i++) {
    const token = tokens[i];
    const m = TOKEN.exec(token);
    if (!m) {
      return {
        ok: false,
        error: `token ${i + 1} (${token}): expected integer dose followed by outcome letters`,
      };
    }
    const dose = parseInt(m[1], 10);
    if (dose === 0) {
      return { ok: false, error: `token ${i + 1} (${token}): dose-level 0 is invalid` };
    }
    if (m[2].length === 0) {
      return { ok: false, error: `token ${i + 1} (${token}): no outcome letters after dose` };
    }
    for (const ch of m[2]) {
      if (!letters.includes(ch)) {
        return {
          ok: false,
          error: `token ${i + 1} (${token}): outcome '${ch}' not in the ${alphabet} alphabet`,
        };
      }
      patients.push({ doseLevel: dose, event: ch });
    }
  }
  return { ok: true, patients };
}

export function validCohortLetters(letters: string, alphabet: AlphabetName): boolean {
  if (letters.length === 0) return false;
  return [...letters].every((ch) => LETTERS[alphabet].includes(ch));
}
