/**
 * Client-side mirror of the server's word counter: the number of maximal
 * runs of non-whitespace characters. The two implementations are held
 * together by a shared 50-string test vector (tests/fixtures/
 * wordcount_vector.json in the registry repo); change one side only in
 * lockstep with the other.
 */
export function countWords(text: string): number {
  const matches = text.match(/\S+/gu);
  return matches ? matches.length : 0;
}

export const SUMMARY_WORD_LIMIT = 250;
