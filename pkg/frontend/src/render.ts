// Pure HTML builders for the session view. No state, no fetch: everything
// rendered is read straight off the latest API response, and all controls
// are disabled outside the active state.

import { ApiErrorBody, SessionView } from './api.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function controlsDisabled(view: SessionView): boolean {
  return view.status !== 'active';
}

export function formatScore(score: number): string {
  return score.toFixed(4);
}

function statusBadge(view: SessionView): string {
  return `<span class="badge badge-${view.status}">${view.status}</span>`;
}

function chip(entity: string, disabled: boolean): string {
  const name = escapeHtml(entity);
  const button = `<button class="chip-action" data-action="not-found" ` +
    `data-class="${name}"${disabled ? ' disabled' : ''} ` +
    `title="I couldn't find this class in the source code">not found?</button>`;
  return `<li class="chip" data-entity="${name}">${name} ${button}</li>`;
}

function row(r: { rank: number; file_id: string; score: number }, disabled: boolean): string {
  const file = escapeHtml(r.file_id);
  const flag = disabled ? ' disabled' : '';
  return (
    `<tr data-file="${file}">` +
    `<td class="rank">${r.rank}</td>` +
    `<td class="path">${file}</td>` +
    `<td class="score">${formatScore(r.score)}</td>` +
    `<td class="actions">` +
    `<button data-action="not-buggy" data-file="${file}"${flag}>not buggy</button> ` +
    `<button data-action="confirm" data-file="${file}"${flag}>confirm bug</button>` +
    `</td></tr>`
  );
}

export function renderSession(view: SessionView): string {
  const disabled = controlsDisabled(view);
  const chips = view.query.entities.map((e) => chip(e, disabled)).join('');
  const rows = view.top10.map((r) => row(r, disabled)).join('');
  const excluded = view.excluded.length
    ? `<p class="excluded">excluded: ${view.excluded.map(escapeHtml).join(', ')}</p>`
    : '';
  const confirmed = view.confirmed_file
    ? `<p class="confirmed">confirmed: ${escapeHtml(view.confirmed_file)}</p>`
    : '';
  return (
    `<section class="session" data-session="${escapeHtml(view.session_id)}">` +
    `<header>` +
    `<h2>${escapeHtml(view.report_id)} ${statusBadge(view)}</h2>` +
    `<p class="meta">${escapeHtml(view.project)}@${escapeHtml(view.version)} ` +
    `&middot; ${escapeHtml(view.category)} ` +
    `&middot; <span class="cycle">cycle ${view.cycle} of ${view.max_cycles}</span></p>` +
    `</header>` +
    `<h3>Query</h3><ul class="chips">${chips}</ul>` +
    excluded +
    confirmed +
    `<h3>Top ${view.top10.length} files</h3>` +
    `<table class="ranking"><thead>` +
    `<tr><th>#</th><th>file</th><th>score</th><th></th></tr>` +
    `</thead><tbody>${rows}</tbody></table>` +
    `</section>`
  );
}

export function renderError(err: ApiErrorBody): string {
  const hint = err.retriable ? ' You can retry this request.' : '';
  return (
    `<div class="banner banner-error" data-code="${escapeHtml(err.code)}">` +
    `${escapeHtml(err.message)}${escapeHtml(hint)}</div>`
  );
}

export function renderPending(): string {
  return `<div class="banner banner-pending">working&hellip;</div>`;
}
