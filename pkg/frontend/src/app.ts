// Controller: owns the session state, talks to the API client, and swaps
// rendered HTML into the container. Events arrive by delegation on
// data-action attributes.

import { ApiClient, ApiError } from './api.js';
import {
    applyError,
    applyFeedback,
    applyInterests,
    applySearch,
    applyStaleRequest,
    canSubmitFeedback,
    clearError,
    initialState,
    loadStoredProfile,
    predictionAvailable,
    storeProfile,
    type SessionState,
} from './state.js';
import { renderApp } from './ui.js';

const INTERESTS_SHOWN = 8;

export class App {
    state: SessionState;

    constructor(
        private readonly root: HTMLElement,
        private readonly client: ApiClient,
        userId: string,
        private readonly storage: Storage = globalThis.localStorage,
    ) {
        this.state = initialState(userId);
        this.root.addEventListener('submit', (event) => void this.onSubmit(event));
        this.root.addEventListener('click', (event) => void this.onClick(event));
        this.root.addEventListener('change', (event) => this.onChange(event));
    }

    async init(): Promise<void> {
        this.state = { ...this.state, profileSelection: loadStoredProfile(this.state.userId, this.storage) };
        try {
            const vocab = await this.client.vocab();
            this.state = { ...this.state, factorVocab: vocab.factors };
            if (this.state.profileSelection.length > 0) {
                await this.refreshInterests();
            }
        } catch (error) {
            this.fail(error);
        }
        this.render();
    }

    render(): void {
        this.root.innerHTML = renderApp(this.state);
    }

    private fail(error: unknown): void {
        if (error instanceof ApiError) {
            this.state = applyError(this.state, error);
        } else {
            throw error;
        }
    }

    private async refreshInterests(): Promise<void> {
        const interests = await this.client.interests(this.state.userId, INTERESTS_SHOWN);
        this.state = applyInterests(this.state, interests);
    }

    async runSearch(text: string): Promise<void> {
        this.state = clearError(this.state);
        const usePrediction = this.state.usePrediction && predictionAvailable(this.state);
        try {
            const response = await this.client.search(
                text,
                predictionAvailable(this.state) ? this.state.userId : undefined,
                { use_prediction: usePrediction, use_word2vec: this.state.useWord2vec },
            );
            this.state = applySearch(this.state, text, response);
        } catch (error) {
            this.fail(error);
        }
        this.render();
    }

    async submitFeedback(itemId: string, accept: boolean): Promise<void> {
        const response = this.state.lastResponse;
        if (response === null || !canSubmitFeedback(this.state, itemId)) {
            return;
        }
        this.state = clearError(this.state);
        try {
            await this.client.feedback(response.request_id, itemId, accept);
            this.state = applyFeedback(this.state, itemId, accept);
            // Show the model shift before the next query.
            if (predictionAvailable(this.state)) {
                await this.refreshInterests();
            }
        } catch (error) {
            if (error instanceof ApiError && error.status === 410) {
                this.state = applyStaleRequest(this.state);
            }
            this.fail(error);
        }
        this.render();
    }

    async saveProfile(selection: string[]): Promise<void> {
        this.state = clearError(this.state);
        try {
            await this.client.putProfile(this.state.userId, selection);
            storeProfile(this.state.userId, selection, this.storage);
            this.state = { ...this.state, profileSelection: selection };
            if (selection.length > 0) {
                await this.refreshInterests();
            } else {
                this.state = applyInterests(this.state, []);
            }
        } catch (error) {
            this.fail(error);
        }
        this.render();
    }

    private async onSubmit(event: Event): Promise<void> {
        const form = event.target as HTMLFormElement;
        const action = form.dataset['action'];
        if (action === undefined) {
            return;
        }
        event.preventDefault();
        if (action === 'search') {
            const input = form.querySelector<HTMLInputElement>('input[name=q]');
            await this.runSearch(input?.value ?? '');
        } else if (action === 'save-profile') {
            const checked = form.querySelectorAll<HTMLInputElement>('input[name=factor]:checked');
            await this.saveProfile([...checked].map((box) => box.value));
        }
    }

    private async onClick(event: Event): Promise<void> {
        const target = (event.target as HTMLElement).closest<HTMLButtonElement>('button[data-action]');
        if (target === null || target.disabled) {
            return;
        }
        const item = target.dataset['item'];
        if (item === undefined) {
            return;
        }
        if (target.dataset['action'] === 'accept') {
            await this.submitFeedback(item, true);
        } else if (target.dataset['action'] === 'reject') {
            await this.submitFeedback(item, false);
        }
    }

    private onChange(event: Event): void {
        const box = event.target as HTMLInputElement;
        if (box.name === 'use_prediction') {
            this.state = { ...this.state, usePrediction: box.checked };
        } else if (box.name === 'use_word2vec') {
            this.state = { ...this.state, useWord2vec: box.checked };
        }
    }
}
