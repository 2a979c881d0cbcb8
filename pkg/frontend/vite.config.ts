/// <reference types="vitest/config" />
import { defineConfig } from "vite";

// The dev server proxies API calls to a locally running
// `nlnetops serve` so the console can be developed against replay fixtures.
export default defineConfig({
  server: {
    proxy: {
      "/api": "http://127.0.0.1:8080",
    },
  },
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
    testTimeout: 30000,
    hookTimeout: 60000,
  },
});
