#pragma once

#include "expresso/zk/signature.hpp"

namespace expresso::circuit {

/// The relying party's secret membership credential issued at registration.
struct ClientCredential {
    zk::Fr client_id;
    zk::Signature signature;
    zk::EdwardsPoint idp_credential_pk;

    bool verify() const { return zk::verify_native(idp_credential_pk, client_id, signature); }

    Bytes to_bytes() const;
    static ClientCredential from_bytes(ByteView bytes);
    friend bool operator==(const ClientCredential&, const ClientCredential&) = default;
};

}  // namespace expresso::circuit
