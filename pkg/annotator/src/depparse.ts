/**
 * Deterministic rule-based dependency head finder.
 *
 * The wink pipeline has no dependency layer, so heads and relations are
 * assigned here from POS patterns tuned to requirements prose ("The X
 * shall VERB the Y ...", copular "should be ADJ to VERB", subordinate
 * "when ..." clauses). The output is a valid tree by construction: one
 * root, contiguous ids, and attachment chains that terminate at the main
 * clause head; a final guard re-attaches anything that would cycle.
 *
 * Relations follow UD v2 naming (nsubj, obj, obl, case, mark, cop, aux,
 * advcl, xcomp, compound, nmod, det, amod, nummod, advmod, punct).
 */

import type { PlainToken } from './pipeline.js';

export interface DepToken extends PlainToken {
  /** 1-based head position, 0 for the root. */
  head: number;
  deprel: string;
}

const SUBORDINATORS = new Set([
  'when', 'if', 'while', 'where', 'unless', 'until', 'because', 'whereas',
  'although', 'once',
]);

const POSSESSIVES = new Set([
  'my', 'your', 'his', 'her', 'its', 'our', 'their', 'whose',
]);

const NOUNISH = new Set(['NOUN', 'PROPN']);

function isContent(upos: string): boolean {
  return ['VERB', 'ADJ', 'NOUN', 'PROPN', 'NUM', 'PRON', 'SYM'].includes(upos);
}

/** Clause boundaries: subordinator with a later verb in the sentence. */
function clauseRanges(tokens: PlainToken[]): Array<[number, number]> {
  const boundaries: number[] = [];
  for (let i = 1; i < tokens.length; i += 1) {
    const t = tokens[i];
    if (!SUBORDINATORS.has(t.lemma.toLowerCase())) continue;
    if (t.upos === 'ADP') continue; // prepositional use, not a clause opener
    const verbAfter = tokens
      .slice(i + 1)
      .some((u) => u.upos === 'VERB');
    if (verbAfter) boundaries.push(i);
  }
  const starts = [0, ...boundaries];
  return starts.map((s, j) => [s, j + 1 < starts.length ? starts[j + 1] : tokens.length]);
}

/** Index of the clause's predicate head within [start, end). */
function clauseHead(tokens: PlainToken[], start: number, end: number): number {
  let auxSeen = -1;
  for (let i = start; i < end; i += 1) {
    if (tokens[i].upos === 'AUX') {
      auxSeen = i;
      break;
    }
  }
  if (auxSeen >= 0) {
    // predicate = first contentful token after the auxiliary chain
    let i = auxSeen;
    while (i < end && (tokens[i].upos === 'AUX' || tokens[i].upos === 'ADV'
           || (tokens[i].upos === 'PART' && tokens[i].lemma === 'not'))) {
      i += 1;
    }
    for (let j = i; j < end; j += 1) {
      if (['VERB', 'ADJ', 'NOUN', 'PROPN', 'NUM'].includes(tokens[j].upos)) {
        return j;
      }
    }
  }
  for (let i = start; i < end; i += 1) {
    if (tokens[i].upos === 'VERB') return i;
  }
  for (let i = start; i < end; i += 1) {
    if (tokens[i].upos === 'ADJ') return i;
  }
  for (let i = start; i < end; i += 1) {
    if (NOUNISH.has(tokens[i].upos) || tokens[i].upos === 'PRON') return i;
  }
  for (let i = start; i < end; i += 1) {
    if (tokens[i].upos !== 'PUNCT') return i;
  }
  return start;
}

export function assignHeads(tokens: PlainToken[]): DepToken[] {
  const n = tokens.length;
  const head = new Array<number>(n).fill(-1); // 0-based target, -2 = root
  const rel = new Array<string>(n).fill('dep');

  const ranges = clauseRanges(tokens);
  const heads = ranges.map(([s, e]) => clauseHead(tokens, s, e));
  const mainHead = heads[0];

  // phrase head of each noun run: the last token of a NOUN/PROPN sequence
  const runEnd = new Array<number>(n).fill(-1);
  for (let i = 0; i < n; i += 1) {
    if (!NOUNISH.has(tokens[i].upos)) continue;
    let j = i;
    while (j + 1 < n && NOUNISH.has(tokens[j + 1].upos)) j += 1;
    for (let k = i; k <= j; k += 1) runEnd[k] = j;
  }

  const attach = (i: number, target: number, deprel: string) => {
    if (head[i] === -1 && target !== i) {
      head[i] = target;
      rel[i] = deprel;
    }
  };

  ranges.forEach(([start, end], clauseIdx) => {
    const h = heads[clauseIdx];
    if (clauseIdx === 0) {
      head[h] = -2;
      rel[h] = 'root';
    } else {
      attach(h, mainHead, 'advcl');
      // the subordinator that opened this clause
      if (SUBORDINATORS.has(tokens[start].lemma.toLowerCase())) {
        attach(start, h, 'mark');
      }
    }

    const headIsVerb = tokens[h].upos === 'VERB';
    let passive = false;

    // compounds inside noun runs
    for (let i = start; i < end; i += 1) {
      if (runEnd[i] > i && runEnd[i] < end) attach(i, runEnd[i], 'compound');
    }

    // auxiliaries, negation, infinitive markers, adverbs, conjunctions
    for (let i = start; i < end; i += 1) {
      if (head[i] !== -1 || i === h) continue;
      const t = tokens[i];
      if (t.upos === 'AUX') {
        if (t.lemma === 'be' && headIsVerb && i < h) {
          attach(i, h, 'aux:pass');
          passive = true;
        } else if (t.lemma === 'be' && !headIsVerb) {
          attach(i, h, 'cop');
        } else {
          attach(i, h, 'aux');
        }
      } else if (t.upos === 'PART') {
        if (t.lemma === 'to') {
          let v = -1;
          for (let j = i + 1; j < end; j += 1) {
            if (tokens[j].upos === 'VERB') { v = j; break; }
            if (isContent(tokens[j].upos)) break;
          }
          if (v >= 0) attach(i, v, 'mark');
          else attach(i, h, 'dep');
        } else {
          attach(i, h, t.lemma === 'not' ? 'advmod' : 'dep');
        }
      } else if (t.upos === 'ADV') {
        attach(i, h, 'advmod');
      } else if (t.upos === 'CCONJ') {
        attach(i, h, 'cc');
      } else if (t.upos === 'VERB') {
        attach(i, h, 'xcomp');
      }
    }

    // determiners, adjectives, numbers point at the next phrase head
    for (let i = start; i < end; i += 1) {
      if (head[i] !== -1 || i === h) continue;
      const t = tokens[i];
      if (t.upos === 'DET' || t.upos === 'ADJ' || t.upos === 'NUM'
          || (t.upos === 'PRON' && POSSESSIVES.has(t.lemma.toLowerCase()))) {
        let target = -1;
        for (let j = i + 1; j < end; j += 1) {
          if (NOUNISH.has(tokens[j].upos)) { target = runEnd[j]; break; }
          if (t.upos === 'NUM' && tokens[j].upos === 'SYM') { target = j; break; }
          if (['VERB', 'ADP', 'AUX', 'PUNCT'].includes(tokens[j].upos)) break;
        }
        if (target >= 0 && target !== i) {
          const deprel =
            t.upos === 'DET' ? 'det'
            : t.upos === 'ADJ' ? 'amod'
            : t.upos === 'NUM' ? 'nummod'
            : 'nmod:poss';
          attach(i, target, deprel);
        } else if (t.upos === 'ADJ') {
          attach(i, h, 'xcomp');
        } else if (t.upos === 'NUM' || t.upos === 'DET') {
          // falls through to noun-like handling below for bare numbers;
          // dangling determiners hang off the clause head
          if (t.upos === 'DET') attach(i, h, 'det');
        } else {
          attach(i, h, 'dep');
        }
      }
    }

    // prepositions: case marker of the next noun phrase, or verb particle
    const caseOf = new Map<number, number>(); // phrase head -> ADP index
    for (let i = start; i < end; i += 1) {
      if (head[i] !== -1 || i === h) continue;
      if (tokens[i].upos !== 'ADP' && tokens[i].upos !== 'SCONJ') continue;
      let target = -1;
      for (let j = i + 1; j < end; j += 1) {
        const u = tokens[j].upos;
        if (NOUNISH.has(u)) { target = runEnd[j]; break; }
        if (u === 'PRON' && POSSESSIVES.has(tokens[j].lemma.toLowerCase())) {
          continue; // determiner-like; the case marker targets its noun
        }
        if (u === 'PRON' || u === 'SYM') { target = j; break; }
        if (u === 'NUM') {
          // the number may modify a following noun or symbol
          let k = runEnd[j + 1] ?? -1;
          if (j + 1 < end && NOUNISH.has(tokens[j + 1].upos)) k = runEnd[j + 1];
          else if (j + 1 < end && tokens[j + 1].upos === 'SYM') k = j + 1;
          target = k >= 0 ? k : j;
          break;
        }
        if (['VERB', 'AUX', 'ADP', 'PUNCT'].includes(u)) break;
      }
      const prevIsVerb = i > start && tokens[i - 1].upos === 'VERB';
      const nextIsAdp = i + 1 < end && tokens[i + 1].upos === 'ADP';
      if (prevIsVerb && (nextIsAdp || target < 0)) {
        attach(i, i - 1, 'compound:prt');
      } else if (target >= 0 && !caseOf.has(target)) {
        caseOf.set(target, i);
        attach(i, target, 'case');
      } else if (target >= 0) {
        attach(i, target, 'case');
      } else if (prevIsVerb) {
        attach(i, i - 1, 'compound:prt');
      } else {
        attach(i, h, 'dep');
      }
    }

    // noun-like tokens: subjects, objects, obliques, of-modifiers
    let subjectSeen = false;
    let objectSeen = false;
    for (let i = start; i < end; i += 1) {
      if (head[i] !== -1 || i === h) continue;
      const t = tokens[i];
      const nounLike =
        (NOUNISH.has(t.upos) && runEnd[i] === i)
        || t.upos === 'PRON'
        || t.upos === 'SYM'
        || t.upos === 'NUM';
      if (!nounLike) continue;
      const marker = caseOf.get(i);
      if (marker !== undefined) {
        if (tokens[marker].lemma.toLowerCase() === 'of') {
          let prev = -1;
          for (let j = i - 1; j >= start; j -= 1) {
            if (j === marker || head[j] === marker) continue;
            if ((NOUNISH.has(tokens[j].upos) && runEnd[j] === j)
                || tokens[j].upos === 'SYM' || tokens[j].upos === 'NUM') {
              prev = j;
              break;
            }
          }
          attach(i, prev >= 0 ? prev : h, prev >= 0 ? 'nmod' : 'obl');
        } else {
          attach(i, h, headIsVerb || tokens[h].upos === 'ADJ' ? 'obl' : 'nmod');
        }
      } else if (i < h) {
        if (!subjectSeen) {
          attach(i, h, passive ? 'nsubj:pass' : 'nsubj');
          subjectSeen = true;
        } else {
          attach(i, h, 'dep');
        }
      } else if (headIsVerb && !objectSeen) {
        attach(i, h, 'obj');
        objectSeen = true;
      } else {
        attach(i, h, 'obl');
      }
    }

    // anything left in the clause hangs off the clause head
    for (let i = start; i < end; i += 1) {
      if (head[i] === -1 && i !== h && tokens[i].upos !== 'PUNCT') {
        attach(i, h, 'dep');
      }
    }
  });

  // punctuation attaches to the sentence root
  for (let i = 0; i < n; i += 1) {
    if (tokens[i].upos === 'PUNCT' && head[i] === -1) {
      attach(i, mainHead, 'punct');
    }
  }
  for (let i = 0; i < n; i += 1) {
    if (head[i] === -1) attach(i, mainHead, 'dep');
  }

  // cycle guard: anything that cannot reach the root gets re-attached
  for (let i = 0; i < n; i += 1) {
    const seen = new Set<number>();
    let node = i;
    while (node !== mainHead && head[node] !== -2) {
      if (seen.has(node)) {
        head[i] = mainHead;
        rel[i] = 'dep';
        break;
      }
      seen.add(node);
      node = head[node];
    }
  }

  return tokens.map((t, i) => ({
    ...t,
    head: head[i] === -2 ? 0 : head[i] + 1,
    deprel: rel[i],
  }));
}
