// Typed client over the ifind JSON API. Every non-2xx response carries a
// {code, message} body which is surfaced verbatim as an ApiError.

export type Provenance = 'EXP' | 'PRE' | 'BOTH';

export interface ResultEntry {
    item_id: string;
    title: string;
    score: number;
    provenance: Provenance;
}

export interface SearchResponse {
    request_id: string;
    results: ResultEntry[];
    predicted_interests: string[];
    expansions: Record<string, string[]>;
}

export interface InterestEntry {
    interest: string;
    score: number;
}

export interface Vocab {
    factors: string[];
    interests: string[];
}

export interface Health {
    status: string;
    corpus_loaded: boolean;
    model_loaded: boolean;
    keyword_count: number;
    alphabet_size: number;
}

export interface SearchOptions {
    use_prediction?: boolean;
    use_word2vec?: boolean;
    max_results?: number;
    threshold?: number;
}

export class ApiError extends Error {
    constructor(
        readonly status: number,
        readonly code: string,
        message: string,
    ) {
        super(message);
        this.name = 'ApiError';
    }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function parseError(response: Response): Promise<ApiError> {
    let code = 'unknown';
    let message = response.statusText;
    try {
        const body = (await response.json()) as { code?: string; message?: string };
        if (body.code) code = body.code;
        if (body.message) message = body.message;
    } catch {
        // non-JSON error body; keep the status text
    }
    return new ApiError(response.status, code, message);
}

export class ApiClient {
    constructor(
        private readonly baseUrl: string = '',
        private readonly fetchFn: FetchLike = (input, init) => globalThis.fetch(input, init),
    ) {}

    private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
        const response = await this.fetchFn(this.baseUrl + path, {
            method,
            headers: body === undefined ? undefined : { 'content-type': 'application/json' },
            body: body === undefined ? undefined : JSON.stringify(body),
        });
        if (!response.ok) {
            throw await parseError(response);
        }
        if (response.status === 204) {
            return undefined as T;
        }
        return (await response.json()) as T;
    }

    search(text: string, userId?: string, options?: SearchOptions): Promise<SearchResponse> {
        return this.request('POST', '/v1/search', {
            text,
            user_id: userId,
            options,
        });
    }

    feedback(requestId: string, itemId: string, accept: boolean): Promise<{ updated: boolean }> {
        return this.request('POST', '/v1/feedback', {
            request_id: requestId,
            item_id: itemId,
            accept,
        });
    }

    putProfile(userId: string, factors: string[]): Promise<void> {
        return this.request('PUT', `/v1/users/${encodeURIComponent(userId)}/profile`, { factors });
    }

    async interests(userId: string, top: number): Promise<InterestEntry[]> {
        const body = await this.request<{ interests: InterestEntry[] }>(
            'GET',
            `/v1/users/${encodeURIComponent(userId)}/interests?top=${top}`,
        );
        return body.interests;
    }

    vocab(): Promise<Vocab> {
        return this.request('GET', '/v1/vocab');
    }

    health(): Promise<Health> {
        return this.request('GET', '/v1/healthz');
    }
}
