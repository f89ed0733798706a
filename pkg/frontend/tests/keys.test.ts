import { describe, expect, it } from "vitest";

import { ServiceApi, type DeviceRecordWire } from "../src/api.js";
import { toBase64 } from "../src/base64.js";
import { KeyStore, MemoryStorage } from "../src/keys.js";

function fakeApi() {
  let enrollments = 0;
  const api = Object.create(ServiceApi.prototype) as ServiceApi;
  api.enrollDevice = async (
    userId: string,
    label: string,
    deviceClass: string,
    publicKey: Uint8Array,
  ): Promise<DeviceRecordWire> => {
    enrollments += 1;
    return {
      device_id: `dev-${enrollments}`,
      user_id: userId,
      label,
      device_class: deviceClass,
      public_key: toBase64(publicKey),
      enrolled_at: 0,
    };
  };
  return { api, count: () => enrollments };
}

const PROFILE = { userId: "user-1", label: "test", deviceClass: "phone" as const };

describe("key store", () => {
  it("persists the key pair across loads", async () => {
    const storage = new MemoryStorage();
    const store = new KeyStore(storage);
    const first = await store.ensureKeys();
    const second = await new KeyStore(storage).ensureKeys();
    expect(Buffer.from(second.signer.publicKey)).toEqual(
      Buffer.from(first.signer.publicKey),
    );
  });

  it("enrolls exactly once per profile", async () => {
    const storage = new MemoryStorage();
    const { api, count } = fakeApi();
    const store = new KeyStore(storage);
    const first = await store.ensureEnrolled(api, PROFILE);
    const second = await store.ensureEnrolled(api, PROFILE);
    const third = await new KeyStore(storage).ensureEnrolled(api, PROFILE);
    expect(count()).toBe(1);
    expect(first.deviceId).toBe("dev-1");
    expect(second.deviceId).toBe("dev-1");
    expect(third.deviceId).toBe("dev-1");
  });

  it("re-enrolls when the profile changes user", async () => {
    const storage = new MemoryStorage();
    const { api, count } = fakeApi();
    const store = new KeyStore(storage);
    await store.ensureEnrolled(api, PROFILE);
    await store.ensureEnrolled(api, { ...PROFILE, userId: "user-2" });
    expect(count()).toBe(2);
  });

  it("reset forgets the identity", async () => {
    const storage = new MemoryStorage();
    const store = new KeyStore(storage);
    const first = await store.ensureKeys();
    store.reset();
    const second = await store.ensureKeys();
    expect(Buffer.from(second.signer.publicKey)).not.toEqual(
      Buffer.from(first.signer.publicKey),
    );
  });
});
