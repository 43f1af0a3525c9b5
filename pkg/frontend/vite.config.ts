/// <reference types="vitest/config" />
import { defineConfig } from "vite";

// In dev mode the studio proxies API calls to a locally running backend
// (`townlet serve`); the production bundle is served by that same backend
// via --static-dir, so requests stay same-origin either way.
export default defineConfig({
  server: {
    proxy: {
      "/api": "http://127.0.0.1:8642",
    },
  },
  build: {
    outDir: "dist",
    sourcemap: true,
  },
  test: {
    environment: "node",
    include: ["tests/**/*.test.ts"],
    testTimeout: 30_000,
    hookTimeout: 60_000,
  },
});
