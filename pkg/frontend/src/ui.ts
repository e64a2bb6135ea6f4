// Pure render functions: state in, HTML string out. The controller swaps
// the container's innerHTML and handles events by delegation on
// data-action attributes, so these stay trivially testable.

import type { SessionState } from './state.js';
import { canSubmitFeedback, predictionAvailable } from './state.js';

function escapeHtml(text: string): string {
    return text
        .replaceAll('&', '&amp;')
        .replaceAll('<', '&lt;')
        .replaceAll('>', '&gt;')
        .replaceAll('"', '&quot;');
}

export function renderError(state: SessionState): string {
    if (state.error === null) {
        return '';
    }
    return (
        `<div class="error" data-testid="error">` +
        `<code>${escapeHtml(state.error.code)}</code> ${escapeHtml(state.error.message)}</div>`
    );
}

export function renderSearchControls(state: SessionState): string {
    const predictionDisabled = predictionAvailable(state) ? '' : ' disabled';
    const predictionChecked = state.usePrediction && predictionAvailable(state) ? ' checked' : '';
    const w2vChecked = state.useWord2vec ? ' checked' : '';
    return `
    <form data-action="search" class="search-form">
      <input type="search" name="q" placeholder="Describe what you are looking for"
             value="${escapeHtml(state.lastQuery)}">
      <button type="submit">Search</button>
      <label><input type="checkbox" name="use_prediction"${predictionChecked}${predictionDisabled}>
        interest prediction</label>
      <label><input type="checkbox" name="use_word2vec"${w2vChecked}> word association</label>
    </form>`;
}

export function renderResults(state: SessionState): string {
    if (state.lastResponse === null) {
        return '<p class="placeholder">No search yet.</p>';
    }
    if (state.lastResponse.results.length === 0) {
        return '<p class="placeholder">No results.</p>';
    }
    const stale = state.requestStale
        ? '<p class="stale-note" data-testid="stale-note">This result list is no longer live; ' +
          'feedback is disabled. Run the search again to give feedback.</p>'
        : '';
    const rows = state.lastResponse.results
        .map((r, index) => {
            const disabled = canSubmitFeedback(state, r.item_id) ? '' : ' disabled';
            return `
      <li class="result" data-item="${escapeHtml(r.item_id)}">
        <span class="rank">${index + 1}</span>
        <span class="badge badge-${r.provenance}" data-testid="badge">${r.provenance}</span>
        <span class="title">${escapeHtml(r.title)}</span>
        <span class="score">${r.score.toFixed(3)}</span>
        <button data-action="accept" data-item="${escapeHtml(r.item_id)}"${disabled}>accept</button>
        <button data-action="reject" data-item="${escapeHtml(r.item_id)}"${disabled}>reject</button>
      </li>`;
        })
        .join('');
    return `${stale}<ol class="results" data-testid="results">${rows}</ol>`;
}

export function renderInterestsPanel(state: SessionState): string {
    if (state.interestsPanel.length === 0) {
        return '<p class="placeholder" data-testid="interests-empty">No predicted interests.</p>';
    }
    const rows = state.interestsPanel
        .map(
            (e) =>
                `<li data-interest="${escapeHtml(e.interest)}">` +
                `${escapeHtml(e.interest)} <span class="score">${e.score.toFixed(3)}</span></li>`,
        )
        .join('');
    return `<ol class="interests" data-testid="interests">${rows}</ol>`;
}

export function renderExpansionsPanel(state: SessionState): string {
    const expansions = state.lastResponse?.expansions ?? {};
    const words = Object.keys(expansions);
    if (words.length === 0) {
        return '<p class="placeholder" data-testid="expansions-empty">No expansions.</p>';
    }
    const rows = words
        .map((word) => {
            const labels = (expansions[word] ?? []).map(escapeHtml).join(', ');
            return `<li><strong>${escapeHtml(word)}</strong> → ${labels}</li>`;
        })
        .join('');
    return `<ul class="expansions" data-testid="expansions">${rows}</ul>`;
}

export function renderProfileEditor(state: SessionState): string {
    const selected = new Set(state.profileSelection);
    const boxes = state.factorVocab
        .map((factor) => {
            const checked = selected.has(factor) ? ' checked' : '';
            return `
      <label class="factor"><input type="checkbox" name="factor"
        value="${escapeHtml(factor)}"${checked}> ${escapeHtml(factor)}</label>`;
        })
        .join('');
    return `
    <form data-action="save-profile" class="profile-form" data-testid="profile">
      <fieldset><legend>Profile factors (${escapeHtml(state.userId)})</legend>${boxes}</fieldset>
      <button type="submit">Save profile</button>
    </form>`;
}

export function renderApp(state: SessionState): string {
    return `
  <main class="ifind">
    ${renderError(state)}
    <section id="controls">${renderSearchControls(state)}</section>
    <section id="results">${renderResults(state)}</section>
    <aside id="interests"><h2>Predicted interests</h2>${renderInterestsPanel(state)}</aside>
    <aside id="expansions"><h2>Expansions</h2>${renderExpansionsPanel(state)}</aside>
    <section id="profile">${renderProfileEditor(state)}</section>
  </main>`;
}
