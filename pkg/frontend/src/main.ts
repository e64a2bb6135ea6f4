import { ApiClient } from './api.js';
import { App } from './app.js';

const params = new URLSearchParams(window.location.search);
const base = params.get('api') ?? '';
const userId = params.get('user') ?? 'default';

const root = document.getElementById('app');
if (root === null) {
    throw new Error('missing #app container');
}
const app = new App(root, new ApiClient(base), userId);
void app.init();
