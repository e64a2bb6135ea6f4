// Session state for one browser tab. The UI holds no model state: every
// number displayed comes from an API response stored here, and the
// feedback-dependent part of the session is reproducible by replaying the
// ledger.

import type { ApiError, InterestEntry, SearchResponse } from './api.js';

export interface FeedbackRecord {
    request_id: string;
    item_id: string;
    signal: 0 | 1;
}

export interface SessionState {
    userId: string;
    profileSelection: string[];
    factorVocab: string[];
    usePrediction: boolean;
    useWord2vec: boolean;
    lastResponse: SearchResponse | null;
    lastQuery: string;
    interestsPanel: InterestEntry[];
    ledger: FeedbackRecord[];
    requestStale: boolean;
    error: { code: string; message: string } | null;
}

export function initialState(userId: string): SessionState {
    return {
        userId,
        profileSelection: [],
        factorVocab: [],
        usePrediction: true,
        useWord2vec: true,
        lastResponse: null,
        lastQuery: '',
        interestsPanel: [],
        ledger: [],
        requestStale: false,
        error: null,
    };
}

// Prediction needs a stored profile; with none selected the toggle is moot.
export function predictionAvailable(state: SessionState): boolean {
    return state.profileSelection.length > 0;
}

// Feedback is only submittable for items of the last response while its
// request_id is still live on the server.
export function canSubmitFeedback(state: SessionState, itemId: string): boolean {
    if (state.lastResponse === null || state.requestStale) {
        return false;
    }
    return state.lastResponse.results.some((r) => r.item_id === itemId);
}

export function applySearch(state: SessionState, query: string, response: SearchResponse): SessionState {
    return {
        ...state,
        lastQuery: query,
        lastResponse: response,
        requestStale: false,
        error: null,
    };
}

export function applyFeedback(state: SessionState, itemId: string, accept: boolean): SessionState {
    if (state.lastResponse === null || !canSubmitFeedback(state, itemId)) {
        throw new Error(`feedback for ${itemId} is not submittable in this session`);
    }
    const record: FeedbackRecord = {
        request_id: state.lastResponse.request_id,
        item_id: itemId,
        signal: accept ? 1 : 0,
    };
    return { ...state, ledger: [...state.ledger, record] };
}

export function applyInterests(state: SessionState, interests: InterestEntry[]): SessionState {
    return { ...state, interestsPanel: interests };
}

export function applyStaleRequest(state: SessionState): SessionState {
    return { ...state, requestStale: true };
}

export function applyError(state: SessionState, error: ApiError): SessionState {
    return { ...state, error: { code: error.code, message: error.message } };
}

export function clearError(state: SessionState): SessionState {
    return { ...state, error: null };
}

// Replayability: folding the ledger over a fresh session (given the same
// responses) reproduces the feedback-dependent state exactly.
export function replayLedger(
    base: SessionState,
    responses: Map<string, SearchResponse>,
    ledger: FeedbackRecord[],
): SessionState {
    let state = base;
    for (const record of ledger) {
        const response = responses.get(record.request_id);
        if (response === undefined) {
            throw new Error(`ledger references unknown request ${record.request_id}`);
        }
        state = applySearch(state, state.lastQuery, response);
        state = applyFeedback(state, record.item_id, record.signal === 1);
    }
    return state;
}

const PROFILE_KEY_PREFIX = 'ifind.profile.';

export function loadStoredProfile(userId: string, storage: Storage): string[] {
    const raw = storage.getItem(PROFILE_KEY_PREFIX + userId);
    if (raw === null) {
        return [];
    }
    try {
        const parsed = JSON.parse(raw) as unknown;
        return Array.isArray(parsed) ? parsed.filter((f): f is string => typeof f === 'string') : [];
    } catch {
        return [];
    }
}

export function storeProfile(userId: string, factors: string[], storage: Storage): void {
    storage.setItem(PROFILE_KEY_PREFIX + userId, JSON.stringify(factors));
}
