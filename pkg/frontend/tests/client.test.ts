import { afterEach, describe, expect, it, vi } from "vitest";
import { ApiClient, ApiError } from "../src/client.js";
import { makeFile } from "./helpers.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("ApiClient", () => {
  it("sends the bearer token on every call", async () => {
    const fetchMock = vi.fn(async () => jsonResponse(200, makeFile()));
    vi.stubGlobal("fetch", fetchMock);
    const client = new ApiClient("http://service");
    client.token = "tok123";

    const record = await client.getFile("d1");

    expect(record.file_id).toBe("d1");
    const [url, init] = fetchMock.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe("http://service/files/d1");
    expect((init.headers as Record<string, string>)["Authorization"])
      .toBe("Bearer tok123");
  });

  it("serializes JSON bodies with the matching content type", async () => {
    const fetchMock = vi.fn(async () =>
      jsonResponse(200, makeFile({ lock: { holder: "u1", acquired_at: 1, expires_at: 601 } })));
    vi.stubGlobal("fetch", fetchMock);
    const client = new ApiClient("http://service");

    await client.getFile("d1");
    const [, init] = fetchMock.mock.calls[0] as unknown as [string, RequestInit];
    expect(init.body).toBeUndefined();

    const postMock = vi.fn(async () =>
      jsonResponse(200, { token: "t".repeat(64), user_id: "u1", expires_at: 9 }));
    vi.stubGlobal("fetch", postMock);
    await client.login("ana", "pw");
    const [, postInit] = postMock.mock.calls[0] as unknown as [string, RequestInit];
    expect(JSON.parse(postInit.body as string)).toEqual({
      display_name: "ana",
      password: "pw",
    });
    expect((postInit.headers as Record<string, string>)["Content-Type"])
      .toBe("application/json");
    expect(client.token).toBe("t".repeat(64));
  });

  it("raises ApiError carrying the error envelope", async () => {
    vi.stubGlobal("fetch", vi.fn(async () =>
      jsonResponse(409, {
        code: "lock_held",
        message: "locked by u2 until 601",
        detail: { holder: "u2", expires_at: 601 },
      })));
    const client = new ApiClient("http://service");

    const error = await client.getFile("d1").catch((e: unknown) => e);

    expect(error).toBeInstanceOf(ApiError);
    const apiError = error as ApiError;
    expect(apiError.status).toBe(409);
    expect(apiError.code).toBe("lock_held");
    expect(apiError.message).toBe("locked by u2 until 601");
    expect(apiError.detail["holder"]).toBe("u2");
  });

  it("falls back to a generic code on non-envelope bodies", async () => {
    vi.stubGlobal("fetch", vi.fn(async () =>
      new Response("bad gateway", { status: 502 })));
    const client = new ApiClient("http://service");

    const error = (await client.getFile("d1").catch((e: unknown) => e)) as ApiError;

    expect(error.code).toBe("http_error");
    expect(error.status).toBe(502);
    expect(error.message).toBe("HTTP 502");
  });

  it("rejects payloads that do not match the wire schema", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(200, { nonsense: true })));
    const client = new ApiClient("http://service");

    await expect(client.getFile("d1")).rejects.toThrow();
  });

  it("posts multipart uploads without forcing a JSON content type", async () => {
    const fetchMock = vi.fn(async () => jsonResponse(200, makeFile()));
    vi.stubGlobal("fetch", fetchMock);
    const client = new ApiClient("http://service");

    await client.uploadFile("p1", "a.pdf", new Uint8Array([37, 80, 68, 70]));

    const [, init] = fetchMock.mock.calls[0] as unknown as [string, RequestInit];
    expect(init.body).toBeInstanceOf(FormData);
    expect((init.headers as Record<string, string>)["Content-Type"]).toBeUndefined();
    const file = (init.body as FormData).get("file");
    expect(file).toBeInstanceOf(Blob);
  });
});
