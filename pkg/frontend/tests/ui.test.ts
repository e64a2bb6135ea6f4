// @vitest-environment jsdom

import { readFileSync } from 'node:fs';
import { join, dirname } from 'node:path';
import { fileURLToPath } from 'node:url';
import { beforeEach, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { App } from '../src/app.js';
import { applySearch, applyStaleRequest, initialState } from '../src/state.js';
import { renderApp, renderExpansionsPanel, renderResults } from '../src/ui.js';

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), 'fixtures');

function recorded(name: string): unknown {
    return JSON.parse(readFileSync(join(FIXTURES, name), 'utf-8'));
}

type Route = { status: number; payload: unknown };

function routedClient(routes: Record<string, Route | Route[]>): ApiClient {
    const remaining = new Map<string, Route[]>();
    for (const [key, value] of Object.entries(routes)) {
        remaining.set(key, Array.isArray(value) ? [...value] : [value]);
    }
    return new ApiClient('', async (url, init) => {
        const key = `${init?.method ?? 'GET'} ${url.split('?')[0]}`;
        const queue = remaining.get(key);
        const route = queue === undefined ? undefined : queue.length > 1 ? queue.shift() : queue[0];
        if (route === undefined) {
            throw new Error(`no stub for ${key}`);
        }
        return new Response(JSON.stringify(route.payload), {
            status: route.status,
            headers: { 'content-type': 'application/json' },
        });
    });
}

function makeApp(routes: Record<string, Route | Route[]>): App {
    document.body.innerHTML = '<div id="app"></div>';
    const root = document.getElementById('app')!;
    return new App(root, routedClient(routes), 'u1', window.localStorage);
}

beforeEach(() => {
    window.localStorage.clear();
});

describe('render functions', () => {
    it('shows a provenance badge exactly as returned', () => {
        const state = applySearch(
            initialState('u1'),
            'q',
            recorded('search.json') as never,
        );
        const html = renderResults(state);
        expect(html).toContain('badge-BOTH');
        expect(html).toContain('badge-EXP');
        expect(html).toContain('badge-PRE');
        expect(html).toContain('Tom Is in The Swimming Pool');
    });

    it('expansions panel is empty when the response has none', () => {
        const state = applySearch(initialState('u1'), 'q', {
            request_id: 'q1',
            results: [],
            predicted_interests: [],
            expansions: {},
        });
        expect(renderExpansionsPanel(state)).toContain('expansions-empty');
    });

    it('expansions panel lists per-keyword labels', () => {
        const state = applySearch(initialState('u1'), 'q', {
            request_id: 'q1',
            results: [],
            predicted_interests: [],
            expansions: { bathing: ['swimming', 'pool'] },
        });
        const html = renderExpansionsPanel(state);
        expect(html).toContain('bathing');
        expect(html).toContain('swimming, pool');
    });

    it('stale response disables feedback controls with an explanation', () => {
        let state = applySearch(initialState('u1'), 'q', recorded('search.json') as never);
        state = applyStaleRequest(state);
        const html = renderResults(state);
        expect(html).toContain('stale-note');
        expect(html).not.toContain('<button data-action="accept" data-item="tom-pool">');
        expect(html).toMatch(/data-action="accept"[^>]* disabled/);
    });

    it('prediction toggle is disabled while the profile is empty', () => {
        const html = renderApp(initialState('u1'));
        expect(html).toMatch(/name="use_prediction"[^>]*disabled/);
    });
});

describe('app controller', () => {
    it('init fetches the factor vocabulary into the profile editor', async () => {
        const app = makeApp({ 'GET /v1/vocab': { status: 200, payload: recorded('vocab.json') } });
        await app.init();
        const boxes = document.querySelectorAll('input[name=factor]');
        expect(boxes.length).toBeGreaterThan(0);
        const values = [...boxes].map((b) => (b as HTMLInputElement).value);
        expect(values).toContain('boy');
    });

    it('search renders results and predicted interests from the response', async () => {
        const app = makeApp({
            'GET /v1/vocab': { status: 200, payload: recorded('vocab.json') },
            'POST /v1/search': { status: 200, payload: recorded('search.json') },
        });
        await app.init();
        await app.runSearch('Stories Related to Tom');
        expect(document.querySelector('[data-testid=results]')!.textContent).toContain(
            'Tom Is in The Swimming Pool',
        );
        const badges = [...document.querySelectorAll('[data-testid=badge]')].map(
            (b) => b.textContent,
        );
        expect(badges).toContain('BOTH');
    });

    it('service errors are surfaced verbatim with code and message', async () => {
        const app = makeApp({
            'GET /v1/vocab': { status: 200, payload: recorded('vocab.json') },
            'POST /v1/search': { status: 400, payload: recorded('error_400.json') },
        });
        await app.init();
        await app.runSearch('');
        const error = document.querySelector('[data-testid=error]')!;
        expect(error.textContent).toContain('empty_request');
        expect(error.textContent).toContain('search needs a non-empty text or a stored profile');
    });

    it('unknown profile factor shows inline validation from the 422 body', async () => {
        const app = makeApp({
            'GET /v1/vocab': { status: 200, payload: recorded('vocab.json') },
            'PUT /v1/users/u1/profile': { status: 422, payload: recorded('error_422.json') },
        });
        await app.init();
        await app.saveProfile(['alien']);
        expect(document.querySelector('[data-testid=error]')!.textContent).toContain('alien');
    });

    it('accepting a result posts feedback and refreshes the interests panel', async () => {
        window.localStorage.setItem('ifind.profile.u1', JSON.stringify(['boy', 'summer']));
        const app = makeApp({
            'GET /v1/vocab': { status: 200, payload: recorded('vocab.json') },
            'GET /v1/users/u1/interests': { status: 200, payload: recorded('interests.json') },
            'POST /v1/search': { status: 200, payload: recorded('search.json') },
            'POST /v1/feedback': { status: 200, payload: { updated: true } },
        });
        await app.init();
        await app.runSearch('Stories Related to Tom');
        const accept = document.querySelector<HTMLButtonElement>(
            'button[data-action=accept][data-item=tom-pool]',
        )!;
        expect(accept.disabled).toBe(false);
        await app.submitFeedback('tom-pool', true);
        expect(app.state.ledger).toEqual([
            { request_id: 'q00000001', item_id: 'tom-pool', signal: 1 },
        ]);
        expect(document.querySelector('[data-testid=interests]')!.textContent).toContain('swimming');
    });

    it('a 410 on feedback marks the request stale and disables the controls', async () => {
        window.localStorage.setItem('ifind.profile.u1', JSON.stringify(['boy', 'summer']));
        const app = makeApp({
            'GET /v1/vocab': { status: 200, payload: recorded('vocab.json') },
            'GET /v1/users/u1/interests': { status: 200, payload: recorded('interests.json') },
            'POST /v1/search': { status: 200, payload: recorded('search.json') },
            'POST /v1/feedback': { status: 410, payload: recorded('error_410.json') },
        });
        await app.init();
        await app.runSearch('Stories Related to Tom');
        await app.submitFeedback('tom-pool', true);
        expect(app.state.requestStale).toBe(true);
        expect(app.state.ledger).toEqual([]);
        expect(document.querySelector('[data-testid=stale-note]')).not.toBeNull();
        const buttons = document.querySelectorAll<HTMLButtonElement>('button[data-action=accept]');
        expect([...buttons].every((b) => b.disabled)).toBe(true);
    });

    it('click delegation drives feedback through the DOM', async () => {
        window.localStorage.setItem('ifind.profile.u1', JSON.stringify(['boy', 'summer']));
        const app = makeApp({
            'GET /v1/vocab': { status: 200, payload: recorded('vocab.json') },
            'GET /v1/users/u1/interests': { status: 200, payload: recorded('interests.json') },
            'POST /v1/search': { status: 200, payload: recorded('search.json') },
            'POST /v1/feedback': { status: 200, payload: { updated: true } },
        });
        await app.init();
        await app.runSearch('Stories Related to Tom');
        document
            .querySelector<HTMLButtonElement>('button[data-action=accept][data-item=tom-pool]')!
            .click();
        await new Promise((resolve) => setTimeout(resolve, 0));
        expect(app.state.ledger.length).toBe(1);
    });
});
